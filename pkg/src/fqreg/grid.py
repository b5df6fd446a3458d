"""Functions sampled on a grid: quadrature and natural cubic spline resampling."""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .exceptions import GridMismatchError, InvalidArgumentError, OutOfRangeError

MIN_GRID_POINTS = 4
DEFAULT_GRID_SIZE = 101


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing abscissae shared by a family of curves."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < MIN_GRID_POINTS:
            raise InvalidArgumentError(
                f"a grid needs at least {MIN_GRID_POINTS} points, got {pts.size}"
            )
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("grid points must be finite")
        if np.any(np.diff(pts) <= 0):
            raise InvalidArgumentError("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.size

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return self is other or np.array_equal(self.points, other.points)

    __hash__ = object.__hash__

    @property
    def weights(self):
        """Composite trapezoid weights; ``weights @ f`` approximates the integral."""
        return trapezoid_weights(self.points)


@dataclass(frozen=True, eq=False)
class Curve:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (len(self.grid),):
            raise InvalidArgumentError(
                f"curve has {vals.size} values for a grid of {len(self.grid)} points"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidArgumentError("curve values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __sub__(self, other):
        _check_same_grid(self.grid, other.grid)
        return Curve(self.grid, self.values - other.values)

    def __add__(self, other):
        _check_same_grid(self.grid, other.grid)
        return Curve(self.grid, self.values + other.values)


def make_uniform_grid(m=DEFAULT_GRID_SIZE):
    """Return the grid ``i / (m - 1)``, ``i = 0..m-1``, on the unit interval."""
    if int(m) != m or m < MIN_GRID_POINTS:
        raise InvalidArgumentError(
            f"grid size must be an integer >= {MIN_GRID_POINTS}, got {m!r}"
        )
    m = int(m)
    return Grid(np.arange(m) / (m - 1))


def trapezoid_weights(points):
    points = np.asarray(points, dtype=float)
    h = np.diff(points)
    w = np.zeros_like(points)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


def _check_same_grid(a, b):
    if not (a is b or a == b):
        raise GridMismatchError("curves are sampled on different grids")


def integrate(values, grid):
    """Trapezoid integral over the grid span, along the last axis of ``values``."""
    return np.asarray(values, dtype=float) @ grid.weights


def inner_product(f, g):
    """Trapezoid approximation of the L2 inner product of two curves."""
    _check_same_grid(f.grid, g.grid)
    return float(np.dot(f.grid.weights, f.values * g.values))


def _second_derivatives(x, y):
    # y has shape (k, n); natural ends fix the outer second derivatives at 0.
    n = x.size
    h = np.diff(x)
    slopes = np.diff(y, axis=1) / h
    rhs = 6.0 * np.diff(slopes, axis=1).T
    ab = np.zeros((3, n - 2))
    ab[0, 1:] = h[1:-1]
    ab[1, :] = 2.0 * (h[:-1] + h[1:])
    ab[2, :-1] = h[1:-1]
    m = np.zeros((n, y.shape[0]))
    m[1:-1] = solve_banded((1, 1), ab, rhs)
    return m.T


def spline_resample(x, y, target):
    """Evaluate natural cubic splines through ``(x, y[k])`` at ``target``.

    Parameters
    ----------
    x : array_like, shape (n,)
        Strictly increasing knots, ``n >= 4``.
    y : array_like, shape (n,) or (k, n)
        One series per row.
    target : array_like, shape (t,)
        Evaluation points inside ``[x[0], x[-1]]``.

    Returns
    -------
    ndarray of shape (t,) or (k, t), matching the dimensionality of ``y``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    target = np.asarray(target, dtype=float)
    squeeze = y.ndim == 1
    y2 = np.atleast_2d(y)
    if x.ndim != 1 or x.size < MIN_GRID_POINTS:
        raise InvalidArgumentError(f"need at least {MIN_GRID_POINTS} knots")
    if y2.shape[1] != x.size:
        raise InvalidArgumentError(
            f"{x.size} knots but {y2.shape[1]} values per series"
        )
    if np.any(np.diff(x) <= 0):
        raise InvalidArgumentError("spline knots must be strictly increasing")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y2))):
        raise InvalidArgumentError("spline input must be finite")
    slack = 1e-12 * (x[-1] - x[0])
    if target.size and (target.min() < x[0] - slack or target.max() > x[-1] + slack):
        raise OutOfRangeError(
            f"target points span [{target.min()}, {target.max()}], "
            f"outside the knot range [{x[0]}, {x[-1]}]"
        )
    t = np.clip(target, x[0], x[-1])

    m = _second_derivatives(x, y2)
    j = np.clip(np.searchsorted(x, t, side="right") - 1, 0, x.size - 2)
    h = x[j + 1] - x[j]
    left = t - x[j]
    right = x[j + 1] - t
    mj, mj1 = m[:, j], m[:, j + 1]
    yj, yj1 = y2[:, j], y2[:, j + 1]
    out = (
        (mj * right**3 + mj1 * left**3) / (6.0 * h)
        + (yj / h - mj * h / 6.0) * right
        + (yj1 / h - mj1 * h / 6.0) * left
    )
    return out[0] if squeeze else out


def natural_cubic_spline(x, y, target):
    """Natural cubic spline through ``(x, y)`` evaluated on the ``target`` grid."""
    return Curve(target, spline_resample(x, y, target.points))
