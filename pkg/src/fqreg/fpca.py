"""Empirical mean, covariance and principal components of a functional sample."""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ComponentDegenerateError, InvalidArgumentError
from .grid import Curve, Grid, _check_same_grid
from .linalg import sym_eig

DEGENERACY_RATIO = 1e-10
SIGN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FunctionalDataset:
    """N curves sampled on one grid, paired with N scalar responses.

    ``curves`` is stored as an ``(N, m)`` array; :meth:`curve` gives row views
    as :class:`Curve` objects.
    """

    grid: Grid
    curves: np.ndarray = field(repr=False)
    responses: np.ndarray = field(repr=False)

    def __post_init__(self):
        curves = np.array(self.curves, dtype=float)
        responses = np.array(self.responses, dtype=float)
        if curves.ndim != 2 or curves.shape[1] != len(self.grid):
            raise InvalidArgumentError(
                f"curves must have shape (N, {len(self.grid)}), got {curves.shape}"
            )
        if curves.shape[0] < 2:
            raise InvalidArgumentError("a functional dataset needs at least 2 curves")
        if responses.shape != (curves.shape[0],):
            raise InvalidArgumentError(
                f"{curves.shape[0]} curves but {responses.size} responses"
            )
        if not (np.all(np.isfinite(curves)) and np.all(np.isfinite(responses))):
            raise InvalidArgumentError("curves and responses must be finite")
        curves.setflags(write=False)
        responses.setflags(write=False)
        object.__setattr__(self, "curves", curves)
        object.__setattr__(self, "responses", responses)

    @classmethod
    def from_curves(cls, curves, responses):
        curves = list(curves)
        if not curves:
            raise InvalidArgumentError("no curves given")
        grid = curves[0].grid
        for c in curves[1:]:
            _check_same_grid(grid, c.grid)
        return cls(grid, np.stack([c.values for c in curves]), responses)

    @property
    def n_curves(self):
        return self.curves.shape[0]

    def curve(self, n):
        return Curve(self.grid, self.curves[n])


@dataclass(frozen=True, eq=False)
class FpcaBasis:
    """Leading ``p`` principal components of a functional sample.

    Attributes
    ----------
    mean : Curve
        Pointwise sample mean.
    eigenvalues : ndarray, shape (p,)
        Leading eigenvalues of the covariance operator, descending.
    eigenfunctions : ndarray, shape (p, m)
        Eigenfunctions on the grid, orthonormal under trapezoid quadrature.
    spectrum : ndarray, shape (m,)
        Every eigenvalue of the discretised operator, descending.
    """

    mean: Curve
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray = field(repr=False)
    spectrum: np.ndarray = field(repr=False)

    @property
    def grid(self):
        return self.mean.grid

    @property
    def p(self):
        return self.eigenvalues.size

    def eigenfunction(self, i):
        return Curve(self.grid, self.eigenfunctions[i])

    @property
    def variance_explained(self):
        """Cumulative fraction of total variance captured by components ``1..p``."""
        total = np.clip(self.spectrum, 0, None).sum()
        return float(self.eigenvalues.sum() / total)


def sample_mean(data):
    return Curve(data.grid, data.curves.mean(axis=0))


def sample_covariance(data):
    """Covariance surface on the grid, with divisor N."""
    centered = data.curves - data.curves.mean(axis=0)
    cov = centered.T @ centered / data.n_curves
    return 0.5 * (cov + cov.T)


def _orient(vectors, weights):
    # Columns flipped so their integral is >= 0, or else the first
    # non-negligible entry is positive.
    integrals = weights @ vectors
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        if abs(integrals[k]) > SIGN_TOL:
            flip = integrals[k] < 0
        else:
            big = np.flatnonzero(np.abs(col) > SIGN_TOL * np.abs(col).max())
            flip = big.size > 0 and col[big[0]] < 0
        if flip:
            vectors[:, k] = -col
    return vectors


def compute_fpca(data, p):
    """Principal components of ``data`` with L2-orthonormal eigenfunctions.

    The covariance operator is discretised with trapezoid weights ``W`` and the
    symmetric matrix ``W^1/2 C W^1/2`` is diagonalised; eigenvectors are mapped
    back through ``W^-1/2`` so that the returned eigenfunctions are orthonormal
    in the quadrature inner product.
    """
    if int(p) != p or p < 1:
        raise InvalidArgumentError(f"number of components must be a positive integer, got {p!r}")
    p = int(p)
    m = len(data.grid)
    if p > m or p > data.n_curves - 1:
        raise ComponentDegenerateError(
            f"cannot estimate {p} components from {data.n_curves} curves on {m} points"
        )
    weights = data.grid.weights
    root = np.sqrt(weights)
    cov = sample_covariance(data)
    eig = sym_eig(root[:, None] * cov * root[None, :])
    lead = eig.values[0]
    if not lead > 0 or not eig.values[p - 1] > DEGENERACY_RATIO * lead:
        raise ComponentDegenerateError(
            f"component {p} is not identifiable "
            f"(eigenvalue {eig.values[p - 1]:.3g} vs leading {lead:.3g})"
        )
    funcs = _orient(eig.vectors[:, :p] / root[:, None], weights)
    return FpcaBasis(
        mean=sample_mean(data),
        eigenvalues=eig.values[:p].copy(),
        eigenfunctions=np.ascontiguousarray(funcs.T),
        spectrum=eig.values,
    )


def choose_p_by_variance(eigenvalues, threshold=0.85):
    """Smallest number of leading components whose share of variance reaches ``threshold``."""
    lam = np.asarray(eigenvalues, dtype=float)
    if not 0 < threshold <= 1:
        raise InvalidArgumentError(f"threshold must lie in (0, 1], got {threshold!r}")
    if lam.ndim != 1 or lam.size == 0 or not np.all(np.isfinite(lam)):
        raise InvalidArgumentError("spectrum must be a non-empty finite vector")
    scale = np.abs(lam).max()
    if scale == 0:
        raise InvalidArgumentError("spectrum is identically zero")
    # rounding noise in a PSD spectrum can leave tiny negative tail values
    if lam.min() < -1e-10 * scale:
        raise InvalidArgumentError("spectrum has negative eigenvalues")
    lam = np.clip(lam, 0, None)
    if np.any(np.diff(lam) > 1e-12 * scale):
        raise InvalidArgumentError("spectrum must be non-increasing")
    ratios = np.cumsum(lam) / lam.sum()
    return int(np.argmax(ratios >= threshold - 1e-12)) + 1
