"""Near-infrared absorbance spectra with fat content (Tecator data).

Canonical file layout: UTF-8 CSV, a header row whose first 100 fields are the
wavelengths in nanometres and whose last field is ``fat``, then one row per
meat sample holding the 100 absorbances and the fat percentage.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import InvalidArgumentError, ParseError
from .fpca import FunctionalDataset, choose_p_by_variance, compute_fpca
from .grid import DEFAULT_GRID_SIZE, Grid, make_uniform_grid, spline_resample
from .quadtest import DEFAULT_VARIANCE_THRESHOLD, run_test

N_CHANNELS = 100
WAVELENGTH_RANGE = (850.0, 1050.0)
RESPONSE_COLUMN = "fat"

# StatLib record: 100 absorbances, 22 principal components, moisture, fat, protein
_STATLIB_RECORD = 125
_STATLIB_FAT = 123


@dataclass(frozen=True, eq=False)
class SpectraTable:
    wavelengths: np.ndarray
    absorbance: np.ndarray = field(repr=False)
    fat: np.ndarray = field(repr=False)

    def __post_init__(self):
        wl = np.asarray(self.wavelengths, dtype=float)
        ab = np.asarray(self.absorbance, dtype=float)
        fat = np.asarray(self.fat, dtype=float)
        if ab.ndim != 2 or ab.shape[1] != wl.size or fat.shape != (ab.shape[0],):
            raise InvalidArgumentError("inconsistent spectra table shapes")
        if np.any(np.diff(wl) <= 0):
            raise InvalidArgumentError("wavelengths must be strictly increasing")
        if not all(np.all(np.isfinite(a)) for a in (wl, ab, fat)):
            raise InvalidArgumentError("spectra table has non-finite entries")

    @property
    def n_samples(self):
        return self.absorbance.shape[0]


def load_spectra_csv(path, n_channels=N_CHANNELS):
    """Read a spectra CSV.

    Parameters
    ----------
    path : str or Path
    n_channels : int or None, default 100
        Required number of wavelength columns; None accepts any count >= 4.

    Raises
    ------
    ParseError
        With the offending 1-based line number for structural or numeric
        problems.
    """
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty file", line=1)
    header = [h.strip() for h in rows[0]]
    if header[-1].lower() != RESPONSE_COLUMN:
        raise ParseError(f"last header column must be {RESPONSE_COLUMN!r}", line=1)
    try:
        wavelengths = [float(h) for h in header[:-1]]
    except ValueError as exc:
        raise ParseError(f"non-numeric wavelength in header ({exc})", line=1) from None
    if n_channels is not None and len(wavelengths) != n_channels:
        raise ParseError(
            f"expected {n_channels} wavelength columns, found {len(wavelengths)}", line=1
        )
    width = len(header)
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != width:
            raise ParseError(f"expected {width} columns, found {len(row)}", line=lineno)
        try:
            values.append([float(cell) for cell in row])
        except ValueError:
            bad = next(k for k, cell in enumerate(row) if not _is_float(cell))
            raise ParseError(
                f"non-numeric value {row[bad]!r} in column {bad + 1}", line=lineno
            ) from None
    if not values:
        raise ParseError("no data rows", line=2)
    data = np.array(values)
    try:
        return SpectraTable(np.array(wavelengths), data[:, :-1], data[:, -1])
    except InvalidArgumentError as exc:
        raise ParseError(str(exc)) from None


def _is_float(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def write_spectra_csv(table, path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow([f"{w:.4f}" for w in table.wavelengths] + [RESPONSE_COLUMN])
        for spectrum, fat in zip(table.absorbance, table.fat):
            out.writerow([repr(float(v)) for v in spectrum] + [repr(float(fat))])


def convert_statlib(raw_path, out_path):
    """Convert the StatLib ``tecator`` archive file to the canonical CSV.

    The archive holds free text followed by 125 numbers per sample; lines
    whose tokens are not all numeric are skipped.
    """
    numbers = []
    with Path(raw_path).open(encoding="utf-8", errors="replace") as fh:
        for line in fh:
            tokens = line.split()
            if tokens and all(_is_float(t) for t in tokens):
                numbers.extend(float(t) for t in tokens)
    if not numbers or len(numbers) % _STATLIB_RECORD:
        raise ParseError(
            f"found {len(numbers)} numbers, not a multiple of {_STATLIB_RECORD}"
        )
    records = np.array(numbers).reshape(-1, _STATLIB_RECORD)
    table = SpectraTable(
        np.linspace(*WAVELENGTH_RANGE, N_CHANNELS),
        records[:, :N_CHANNELS],
        records[:, _STATLIB_FAT],
    )
    write_spectra_csv(table, out_path)
    return table


def to_functional_dataset(table, m=DEFAULT_GRID_SIZE, grid=None):
    """Rescale wavelengths to [0, 1] and spline-resample every spectrum.

    The target is a uniform grid of ``m`` points unless ``grid`` is given.
    """
    wl = table.wavelengths
    knots = (wl - wl[0]) / (wl[-1] - wl[0])
    target = make_uniform_grid(m) if grid is None else grid
    if not isinstance(target, Grid):
        target = Grid(target)
    curves = spline_resample(knots, table.absorbance, target.points)
    return FunctionalDataset(target, curves, table.fat)


@dataclass(frozen=True)
class TecatorAnalysis:
    results: list
    selected_p: int
    variance_threshold: float

    def by_p(self):
        return {res.p: res for res in self.results}


def run_tecator_analysis(
    table, p_values_to_try=(1, 2, 3), m=DEFAULT_GRID_SIZE, var_threshold=DEFAULT_VARIANCE_THRESHOLD
):
    """Run the test for each requested number of components.

    Also reports the number of components the variance threshold would
    select on its own.
    """
    data = to_functional_dataset(table, m)
    spectrum = compute_fpca(data, 1).spectrum
    selected = choose_p_by_variance(spectrum, var_threshold)
    results = [run_test(data, p=int(p)) for p in p_values_to_try]
    return TecatorAnalysis(results, selected, var_threshold)
