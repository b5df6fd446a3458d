"""Small dense kernels: Jacobi eigensolver, normal-equations least squares,
and the chi-square survival function."""

import math
from typing import NamedTuple

import numba
import numpy as np

from .exceptions import FqregError, InvalidArgumentError, SingularDesignError

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
PIVOT_TOL = 1e-12
SYMMETRY_TOL = 1e-12


class EigenDecomposition(NamedTuple):
    values: np.ndarray  # descending
    vectors: np.ndarray  # columns, orthonormal


def as_symmetric(a):
    """Validate a square symmetric matrix and return an exactly symmetric copy."""
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidArgumentError("matrix has non-finite entries")
    scale = max(np.abs(a).max(initial=0.0), 1.0)
    if np.abs(a - a.T).max(initial=0.0) > SYMMETRY_TOL * scale:
        raise InvalidArgumentError("matrix is not symmetric")
    return 0.5 * (a + a.T)


@numba.njit(cache=True)
def _jacobi_sweeps(a, v, tol, max_sweeps):
    # Cyclic-by-row Jacobi; rotations are applied in place to a and v.
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                x = abs(a[i, j])
                if x > off:
                    off = x
        if off < tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return -1


def sym_eig(a):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps continue until every off-diagonal entry is below
    ``1e-12 * ||a||_F``.

    Returns
    -------
    EigenDecomposition
        Eigenvalues in descending order and the matching orthonormal
        eigenvectors as columns.
    """
    work = as_symmetric(a)
    n = work.shape[0]
    vectors = np.eye(n)
    fro = np.linalg.norm(work)
    if n > 1 and fro > 0:
        sweeps = _jacobi_sweeps(work, vectors, JACOBI_TOL * fro, JACOBI_MAX_SWEEPS)
        if sweeps < 0:
            raise FqregError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    values = work.diagonal().copy()
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values[order], vectors[:, order])


def _cholesky(g):
    q = g.shape[0]
    low = np.zeros_like(g)
    floor = PIVOT_TOL * g.diagonal().max(initial=0.0)
    for k in range(q):
        d = g[k, k] - low[k, :k] @ low[k, :k]
        if not d > floor:
            raise SingularDesignError(
                f"design is rank deficient at column {k} (pivot {d:.3g})", column=k
            )
        low[k, k] = math.sqrt(d)
        low[k + 1 :, k] = (g[k + 1 :, k] - low[k + 1 :, :k] @ low[k, :k]) / low[k, k]
    return low


def _forward(low, b):
    x = np.empty_like(b)
    for i in range(b.size):
        x[i] = (b[i] - low[i, :i] @ x[:i]) / low[i, i]
    return x


def _backward(up, b):
    n = b.size
    x = np.empty_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - up[i, i + 1 :] @ x[i + 1 :]) / up[i, i]
    return x


def solve_least_squares(z, y):
    """Minimise ``||y - z @ beta||`` through the Cholesky-factored normal equations.

    Raises
    ------
    SingularDesignError
        If a pivot of ``z.T @ z`` falls below ``1e-12`` times its largest
        diagonal entry.  The error's ``column`` names the offending column.
    """
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    if z.ndim != 2 or y.shape != (z.shape[0],):
        raise InvalidArgumentError(
            f"design {z.shape} and response {y.shape} are incompatible"
        )
    n, q = z.shape
    if n < q:
        raise SingularDesignError(f"{n} observations cannot identify {q} coefficients")
    low = _cholesky(z.T @ z)
    return _backward(low.T, _forward(low, z.T @ y))


_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


def _lower_series(a, x):
    # Regularized lower incomplete gamma P(a, x); converges fast for x < a + 1.
    term = total = 1.0 / a
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_fraction(a, x):
    # Regularized upper incomplete gamma Q(a, x) by modified Lentz; x >= a + 1.
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def chi2_upper_tail(x, r):
    """``P(chi2(r) > x)``, i.e. the regularized upper incomplete gamma Q(r/2, x/2)."""
    if int(r) != r or r < 1:
        raise InvalidArgumentError(f"degrees of freedom must be a positive integer, got {r!r}")
    x = float(x)
    if math.isnan(x) or x < 0:
        raise InvalidArgumentError(f"chi-square argument must be >= 0, got {x!r}")
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    a, half = r / 2.0, x / 2.0
    if half == 0.0:  # subnormal x
        return 1.0
    if x < r + 1:
        return min(1.0, max(0.0, 1.0 - _lower_series(a, half)))
    return min(1.0, max(0.0, _upper_fraction(a, half)))
