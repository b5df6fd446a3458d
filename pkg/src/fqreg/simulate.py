"""Seeded data generators and the Monte Carlo size/power harness.

Randomness
----------
Every replication ``i`` of a study draws from its own PCG64 stream, seeded by
``SeedSequence(seed, spawn_key=(i,))``.  Streams therefore depend only on
``(seed, i)`` and results are identical whatever the number of workers or
the order in which replications run.  Normal variates come from the
Marsaglia polar transform applied to the stream's uniform doubles, so the
only generator-level primitive used is ``Generator.random``.

Within a replication the draws happen in a fixed order: the curves (row by
row), then the regression errors.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import FqregError, InvalidArgumentError, IterationError
from .fpca import FunctionalDataset
from .grid import Curve, DEFAULT_GRID_SIZE, integrate, make_uniform_grid
from .quadtest import run_test

DESIGNS = ("gaussian", "chebyshev_t5")
DEFAULT_SEED = 20120713
DEFAULT_ITERATIONS = 2000
_SEED_MASK = (1 << 64) - 1


def derive_stream(seed, iteration):
    """Independent, reproducible generator for replication ``iteration``."""
    if iteration < 0:
        raise InvalidArgumentError("iteration index must be non-negative")
    ss = np.random.SeedSequence(int(seed) & _SEED_MASK, spawn_key=(int(iteration),))
    return np.random.Generator(np.random.PCG64(ss))


def standard_normal(rng, size):
    """Standard normal variates by the Marsaglia polar method."""
    shape = (size,) if np.isscalar(size) else tuple(size)
    total = int(np.prod(shape))
    out = np.empty(total)
    filled = 0
    while filled < total:
        need = total - filled
        # acceptance rate is pi/4; over-draw so one pass nearly always suffices
        pairs = int(math.ceil(need / 2 * 1.3)) + 4
        u = 2.0 * rng.random((pairs, 2)) - 1.0
        s = np.einsum("ij,ij->i", u, u)
        keep = (s > 0.0) & (s < 1.0)
        u, s = u[keep], s[keep]
        z = (u * np.sqrt(-2.0 * np.log(s) / s)[:, None]).ravel()
        take = min(need, z.size)
        out[filled : filled + take] = z[:take]
        filled += take
    return out.reshape(shape)


def student_t5(rng, size):
    """Student-t(5) variates as ``Z / sqrt(V / 5)`` with V a sum of 5 squared normals."""
    shape = (size,) if np.isscalar(size) else tuple(size)
    draws = standard_normal(rng, shape + (6,))
    v = np.sum(draws[..., 1:] ** 2, axis=-1)
    return draws[..., 0] / np.sqrt(v / 5.0)


def brownian_sample(grid, n, rng):
    """``n`` standard Brownian paths on ``grid`` (started at 0 at the first point)."""
    steps = np.sqrt(np.diff(grid.points))
    incr = standard_normal(rng, (n, len(grid) - 1)) * steps
    paths = np.zeros((n, len(grid)))
    np.cumsum(incr, axis=1, out=paths[:, 1:])
    return paths


def simulate_brownian(grid, rng):
    return Curve(grid, brownian_sample(grid, 1, rng)[0])


def chebyshev_basis(t):
    """``T0..T3`` Chebyshev polynomials evaluated at ``t``, shape (4, len(t))."""
    t = np.asarray(t, dtype=float)
    return np.stack([np.ones_like(t), t, 2 * t**2 - 1, 4 * t**3 - 3 * t])


def chebyshev_sample(grid, n, rng, coefficients=None):
    """Curves ``(T1 + T2 t + T3 (2t^2-1) + T4 (4t^3-3t)) / 4`` with iid t(5) coefficients."""
    coef = student_t5(rng, (n, 4)) if coefficients is None else np.asarray(coefficients, float)
    coef = np.atleast_2d(coef)
    return coef @ chebyshev_basis(grid.points) / 4.0


def simulate_chebyshev_t5(grid, rng, coefficients=None):
    return Curve(grid, chebyshev_sample(grid, 1, rng, coefficients)[0])


def generate_response(curves, c, design, rng, grid=None, noise=None):
    """Responses ``Y = int X + c (int X)^2 + eps`` for ``k = 1`` and ``h = c``.

    Parameters
    ----------
    curves : sequence of Curve or ndarray of shape (N, m)
        Predictor curves; an array needs ``grid``.
    c : float
        Constant value of the quadratic kernel.
    design : {'gaussian', 'chebyshev_t5'}
        Selects the error law: standard normal or uniform on (-0.5, 0.5).
    rng : numpy.random.Generator
    noise : array_like, optional
        Use these errors instead of drawing them.
    """
    if design not in DESIGNS:
        raise InvalidArgumentError(f"unknown design {design!r}; expected one of {DESIGNS}")
    if isinstance(curves, np.ndarray):
        if grid is None:
            raise InvalidArgumentError("a grid is required with an array of curves")
        values = np.atleast_2d(curves)
    else:
        curves = list(curves)
        grid = curves[0].grid
        values = np.stack([cv.values for cv in curves])
    n = values.shape[0]
    linear = integrate(values, grid)
    if noise is None:
        if design == "gaussian":
            noise = standard_normal(rng, n)
        else:
            noise = rng.random(n) - 0.5
    return linear + c * linear**2 + np.asarray(noise, dtype=float)


@dataclass(frozen=True)
class SimScenario:
    n_curves: int
    c: float = 0.0
    p: int = 1
    alpha: float = 0.05
    iterations: int = DEFAULT_ITERATIONS
    design: str = "gaussian"
    grid_size: int = DEFAULT_GRID_SIZE
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.design not in DESIGNS:
            raise InvalidArgumentError(f"unknown design {self.design!r}")
        if self.iterations < 1:
            raise InvalidArgumentError("iterations must be >= 1")
        if not 0 < self.alpha < 1:
            raise InvalidArgumentError("alpha must lie in (0, 1)")
        if self.c < 0:
            raise InvalidArgumentError("c must be non-negative")
        if self.p < 1:
            raise InvalidArgumentError("p must be >= 1")
        if self.n_curves < 2:
            raise InvalidArgumentError("need at least 2 curves")
        make_uniform_grid(self.grid_size)


@dataclass(frozen=True)
class PowerRow:
    scenario: SimScenario
    rejection_rate: float
    rejections: int
    mc_stderr: float

    def to_dict(self):
        return asdict(self)


def simulate_dataset(scenario, iteration):
    """Dataset of replication ``iteration`` of ``scenario``."""
    rng = derive_stream(scenario.seed, iteration)
    grid = make_uniform_grid(scenario.grid_size)
    if scenario.design == "gaussian":
        x = brownian_sample(grid, scenario.n_curves, rng)
    else:
        x = chebyshev_sample(grid, scenario.n_curves, rng)
    y = generate_response(x, scenario.c, scenario.design, rng, grid=grid)
    return FunctionalDataset(grid, x, y)


def _replicate(scenario, iterations):
    out = np.empty((len(iterations), 2))
    for k, i in enumerate(iterations):
        try:
            res = run_test(simulate_dataset(scenario, i), p=scenario.p)
        except FqregError as exc:
            raise IterationError(f"replication {i} failed: {exc}", iteration=i) from exc
        out[k] = res.u_stat, res.p_value
    return out


def default_threads():
    return int(os.environ.get("FQREG_THREADS", "1"))


def simulate_statistics(scenario, threads=1):
    """Statistic and p-value of every replication, in replication order.

    Returns
    -------
    ndarray of shape (iterations, 2)
        Columns are ``U_N`` and its p-value.
    """
    idx = list(range(scenario.iterations))
    if threads is None:
        threads = default_threads()
    if threads <= 1 or scenario.iterations == 1:
        return _replicate(scenario, idx)
    chunks = [idx[k::threads] for k in range(threads) if idx[k::threads]]
    out = np.empty((scenario.iterations, 2))
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        for chunk, res in zip(chunks, pool.map(_replicate, [scenario] * len(chunks), chunks)):
            out[chunk] = res
    return out


def power_row(scenario, p_values):
    rejections = int(np.count_nonzero(np.asarray(p_values) < scenario.alpha))
    rate = rejections / scenario.iterations
    return PowerRow(
        scenario=scenario,
        rejection_rate=rate,
        rejections=rejections,
        mc_stderr=math.sqrt(rate * (1 - rate) / scenario.iterations),
    )


def run_power_study(scenario, threads=1):
    """Empirical rejection rate of the test at level ``scenario.alpha``."""
    stats = simulate_statistics(scenario, threads)
    return power_row(scenario, stats[:, 1])
