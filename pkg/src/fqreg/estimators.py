"""scikit-learn compatible wrappers around the functional PCA and the test."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_components, check_curves, check_responses, resolve_grid
from .fpca import FunctionalDataset, choose_p_by_variance, compute_fpca
from .quadtest import DEFAULT_VARIANCE_THRESHOLD, run_test


class FunctionalPCA(TransformerMixin, BaseEstimator):
    """Functional principal component analysis of curves sampled on a common grid.

    Parameters
    ----------
    n_components : int, optional
        Number of components.  If None, the smallest number explaining
        ``variance_threshold`` of the total variance.
    variance_threshold : float, default 0.85
    grid : array_like or Grid, optional
        Sampling points of the curves; a uniform grid on [0, 1] if omitted.

    Attributes
    ----------
    basis_ : FpcaBasis
    mean_ : ndarray of shape (n_points,)
    components_ : ndarray of shape (n_components_, n_points)
        Eigenfunctions, orthonormal under trapezoid quadrature.
    eigenvalues_ : ndarray of shape (n_components_,)
    explained_variance_ratio_ : ndarray of shape (n_components_,)
    """

    def __init__(self, n_components=None, variance_threshold=DEFAULT_VARIANCE_THRESHOLD, grid=None):
        self.n_components = n_components
        self.variance_threshold = variance_threshold
        self.grid = grid

    def fit(self, X, y=None):
        check_components(self.n_components, self.variance_threshold)
        X = check_curves(X)
        self.grid_ = resolve_grid(self.grid, X.shape[1])
        data = FunctionalDataset(self.grid_, X, np.zeros(X.shape[0]))
        p = self.n_components
        if p is None:
            p = choose_p_by_variance(compute_fpca(data, 1).spectrum, self.variance_threshold)
        self.basis_ = compute_fpca(data, p)
        self.n_components_ = self.basis_.p
        self.mean_ = self.basis_.mean.values
        self.components_ = self.basis_.eigenfunctions
        self.eigenvalues_ = self.basis_.eigenvalues
        total = np.clip(self.basis_.spectrum, 0, None).sum()
        self.explained_variance_ratio_ = self.eigenvalues_ / total
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        X = check_curves(X, self.n_features_in_, min_samples=1)
        return (X - self.mean_) @ (self.components_ * self.grid_.weights).T

    def inverse_transform(self, scores):
        check_is_fitted(self, "basis_")
        return self.mean_ + np.atleast_2d(scores) @ self.components_


class QuadraticSignificanceTest(RegressorMixin, BaseEstimator):
    """Test whether a functional quadratic regression needs its quadratic term.

    ``fit`` projects the curves on their leading principal components, fits
    the projected quadratic model and computes the statistic and its
    chi-square p-value.  ``predict`` evaluates the fitted quadratic model.

    Parameters
    ----------
    n_components : int, optional
        Number of principal components ``p``; chosen by ``variance_threshold``
        when None.
    variance_threshold : float, default 0.85
    alpha : float, default 0.05
        Level used for ``reject_``.
    grid : array_like or Grid, optional

    Attributes
    ----------
    result_ : TestResult
    u_statistic_ : float
    dof_ : int
    p_value_ : float
    reject_ : bool
    coef_quadratic_ : ndarray of shape (p, p)
        Symmetric quadratic-kernel coefficients in the component basis.
    coef_linear_ : ndarray of shape (p,)
    intercept_ : float
    """

    def __init__(
        self,
        n_components=None,
        variance_threshold=DEFAULT_VARIANCE_THRESHOLD,
        alpha=0.05,
        grid=None,
    ):
        self.n_components = n_components
        self.variance_threshold = variance_threshold
        self.alpha = alpha
        self.grid = grid

    def fit(self, X, y):
        check_components(self.n_components, self.variance_threshold)
        X = check_curves(X)
        y = check_responses(y, X.shape[0])
        self.grid_ = resolve_grid(self.grid, X.shape[1])
        data = FunctionalDataset(self.grid_, X, y)
        res = run_test(data, p=self.n_components, var_threshold=self.variance_threshold)
        self.result_ = res
        self.u_statistic_ = res.u_stat
        self.dof_ = res.dof
        self.p_value_ = res.p_value
        self.reject_ = bool(res.p_value < self.alpha)
        self.coef_quadratic_ = res.fit.a_matrix
        self.coef_linear_ = res.fit.b_hat
        self.intercept_ = res.fit.mu_hat
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "result_")
        X = check_curves(X, self.n_features_in_, min_samples=1)
        basis = self.result_.basis
        scores = (X - basis.mean.values) @ (basis.eigenfunctions * self.grid_.weights).T
        return self.result_.fit.fitted_values(scores)
