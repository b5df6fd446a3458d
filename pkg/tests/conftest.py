from pathlib import Path

import numpy as np
import pytest

from fqreg.fpca import FunctionalDataset
from fqreg.grid import make_uniform_grid
from fqreg.simulate import brownian_sample, derive_stream

REPO = Path(__file__).resolve().parents[1]
TECATOR_CSV = REPO / "data" / "tecator.csv"

_acceptance_lines = []


def brownian_dataset(n, seed, m=101, y=None):
    grid = make_uniform_grid(m)
    x = brownian_sample(grid, n, derive_stream(seed, 0))
    if y is None:
        y = np.zeros(n)
    return FunctionalDataset(grid, x, y)


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the terminal summary, then assert."""

    def _report(name, ok, detail):
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, f"{name}: {detail}"

    return _report


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
