import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import InvalidArgumentError
from .grid import Grid, make_uniform_grid


def check_curves(X, n_points=None, min_samples=2):
    """Coerce ``X`` to a finite float array of shape (n_samples, n_points)."""
    X = check_array(X, dtype=np.float64, ensure_min_samples=min_samples)
    if n_points is not None and X.shape[1] != n_points:
        raise InvalidArgumentError(
            f"X has {X.shape[1]} grid values per curve, expected {n_points}"
        )
    return X


def check_responses(y, n_samples):
    y = check_array(y, dtype=np.float64, ensure_2d=False)
    if y.ndim != 1 or y.shape[0] != n_samples:
        raise InvalidArgumentError(f"y must be a vector of length {n_samples}")
    return y


def resolve_grid(grid, n_points):
    """``None`` means a uniform grid on [0, 1]; arrays are wrapped as a Grid."""
    if grid is None:
        return make_uniform_grid(n_points)
    if not isinstance(grid, Grid):
        grid = Grid(np.asarray(grid, dtype=float))
    if len(grid) != n_points:
        raise InvalidArgumentError(
            f"grid has {len(grid)} points but curves have {n_points} values"
        )
    return grid


def check_components(n_components, variance_threshold):
    if n_components is not None and (int(n_components) != n_components or n_components < 1):
        raise InvalidArgumentError(
            f"n_components must be a positive integer or None, got {n_components!r}"
        )
    if not 0 < variance_threshold <= 1:
        raise InvalidArgumentError(
            f"variance_threshold must lie in (0, 1], got {variance_threshold!r}"
        )
