"""Significance test for the quadratic term of a functional quadratic regression.

Curves are projected onto their leading ``p`` estimated principal components.
The response is regressed by least squares on the ``r = p(p+1)/2`` products of
scores, the ``p`` scores themselves and an intercept.  The size of the
quadratic coefficient block, weighted by the empirical covariance of the
product regressors and scaled by the residual variance, gives the statistic
``U_N``, which is referred to a chi-square distribution with ``r`` degrees of
freedom.
"""

from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    FqregError,
    GridMismatchError,
    InvalidArgumentError,
    PerfectFitError,
    SingularDesignError,
)
from .fpca import choose_p_by_variance, compute_fpca
from .linalg import chi2_upper_tail, solve_least_squares

PERFECT_FIT_RATIO = 1e-12
DEFAULT_VARIANCE_THRESHOLD = 0.85


def vech_index(p):
    """Index pairs ``(i, j)``, ``i >= j``, of a p x p lower triangle, column by column.

    Pairs are zero-based: ``vech_index(2) == [(0, 0), (1, 0), (1, 1)]``.
    """
    return [(i, j) for j in range(p) for i in range(j, p)]


def n_quadratic_terms(p):
    return p * (p + 1) // 2


@dataclass(frozen=True, eq=False)
class QuadFit:
    """Least-squares fit of the projected quadratic model.

    ``a_hat`` holds the raw regression coefficients of the product columns in
    :func:`vech_index` order; off-diagonal entries therefore equal twice the
    symmetric kernel coefficient.  Use :attr:`a_matrix` for the symmetric
    coefficients themselves.
    """

    a_hat: np.ndarray
    b_hat: np.ndarray
    mu_hat: float
    residuals: np.ndarray = field(repr=False)
    tau2_hat: float
    g_hat: np.ndarray = field(repr=False)
    m_hat: np.ndarray = field(repr=False)
    scores: np.ndarray = field(repr=False)
    response_var: float = field(repr=False)

    @property
    def p(self):
        return self.b_hat.size

    @property
    def n_obs(self):
        return self.residuals.size

    @property
    def a_matrix(self):
        """Symmetric p x p matrix of quadratic kernel coefficients."""
        out = np.zeros((self.p, self.p))
        for k, (i, j) in enumerate(vech_index(self.p)):
            val = self.a_hat[k] if i == j else self.a_hat[k] / 2.0
            out[i, j] = out[j, i] = val
        return out

    @property
    def weight_matrix(self):
        return self.g_hat - np.outer(self.m_hat, self.m_hat)

    def fitted_values(self, scores=None):
        s = self.scores if scores is None else np.asarray(scores, dtype=float)
        return build_design(s) @ np.concatenate([self.a_hat, self.b_hat, [self.mu_hat]])


@dataclass(frozen=True, eq=False)
class TestResult:
    u_stat: float
    dof: int
    p_value: float
    fit: QuadFit = field(repr=False)
    basis: object = field(repr=False)
    # set when the tail probability underflows double precision
    p_value_underflow: bool = False

    __test__ = False  # not a pytest class

    @property
    def p(self):
        return self.basis.p

    @property
    def variance_explained(self):
        return self.basis.variance_explained


def compute_scores(data, basis):
    """Projections of the centred curves onto the basis eigenfunctions, shape (N, p)."""
    if not (data.grid is basis.grid or data.grid == basis.grid):
        raise GridMismatchError("dataset and basis live on different grids")
    centered = data.curves - basis.mean.values
    return centered @ (basis.eigenfunctions * data.grid.weights).T


def quadratic_columns(scores):
    s = np.asarray(scores, dtype=float)
    return np.column_stack([s[:, i] * s[:, j] for i, j in vech_index(s.shape[1])])


def build_design(scores):
    """Design rows ``[products in vech order | scores | 1]``."""
    s = np.asarray(scores, dtype=float)
    if s.ndim != 2 or s.shape[1] < 1:
        raise InvalidArgumentError(f"scores must be an (N, p) matrix, got shape {s.shape}")
    return np.column_stack([quadratic_columns(s), s, np.ones(s.shape[0])])


def fit_quadratic(data, basis, allow_perfect_fit=False):
    """Fit the projected quadratic model by least squares.

    Parameters
    ----------
    data : FunctionalDataset
    basis : FpcaBasis
    allow_perfect_fit : bool, default False
        Return fits whose residual variance vanishes instead of raising.
        The statistic is still undefined for such fits.

    Raises
    ------
    SingularDesignError
        Too few observations for the ``r + p + 1`` coefficients, or a
        rank-deficient design.
    PerfectFitError
        Residual variance below ``1e-12`` times the response variance.
    """
    p = basis.p
    r = n_quadratic_terms(p)
    n = data.n_curves
    if n < r + p + 2:
        raise SingularDesignError(
            f"{n} observations are too few for p={p} ({r + p + 1} coefficients)"
        )
    scores = compute_scores(data, basis)
    design = build_design(scores)
    y = data.responses
    coef = solve_least_squares(design, y)
    residuals = y - design @ coef
    prods = design[:, :r]
    fit = QuadFit(
        a_hat=coef[:r],
        b_hat=coef[r : r + p],
        mu_hat=float(coef[-1]),
        residuals=residuals,
        tau2_hat=float(np.mean(residuals**2)),
        g_hat=prods.T @ prods / n,
        m_hat=prods.mean(axis=0),
        scores=scores,
        response_var=float(np.var(y)),
    )
    if not allow_perfect_fit:
        _check_not_perfect(fit)
    return fit


def _check_not_perfect(fit):
    if not fit.tau2_hat > PERFECT_FIT_RATIO * fit.response_var:
        raise PerfectFitError(
            f"residual variance {fit.tau2_hat:.3g} is negligible; "
            "the response is reproduced exactly and the test is undefined",
            fit=fit,
        )


def u_statistic(fit, n=None):
    """``U_N = N / tau2 * A' (G - M M') A`` for a fitted model."""
    n = fit.n_obs if n is None else n
    _check_not_perfect(fit)
    # A'(G - MM')A equals the mean squared deviation of D_n'A about M'A,
    # which is exactly non-negative in floating point.
    proj = quadratic_columns(fit.scores) @ fit.a_hat
    quad = np.mean((proj - fit.m_hat @ fit.a_hat) ** 2)
    return float(n / fit.tau2_hat * quad)


@contextmanager
def _stage(name):
    try:
        yield
    except FqregError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


def run_test(data, p=None, var_threshold=DEFAULT_VARIANCE_THRESHOLD):
    """Run the full test on a functional dataset.

    Parameters
    ----------
    data : FunctionalDataset
    p : int, optional
        Number of principal components.  When omitted, the smallest ``p``
        explaining ``var_threshold`` of the sample variance is used.
    var_threshold : float, default 0.85

    Returns
    -------
    TestResult
    """
    with _stage("fpca"):
        if p is None:
            basis = compute_fpca(data, 1)
            p = choose_p_by_variance(basis.spectrum, var_threshold)
            if p > 1:
                basis = compute_fpca(data, p)
        else:
            basis = compute_fpca(data, p)
    with _stage("fit"):
        fit = fit_quadratic(data, basis)
    with _stage("statistic"):
        u = u_statistic(fit, data.n_curves)
        r = n_quadratic_terms(basis.p)
        pval = chi2_upper_tail(u, r)
    return TestResult(
        u_stat=u, dof=r, p_value=pval, fit=fit, basis=basis, p_value_underflow=pval == 0.0
    )
