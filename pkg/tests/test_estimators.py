import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.linear_model import LinearRegression

from fqreg import FunctionalPCA, QuadraticSignificanceTest
from fqreg.exceptions import InvalidArgumentError
from fqreg.fpca import compute_fpca
from fqreg.quadtest import run_test
from fqreg.simulate import SimScenario, simulate_dataset


@pytest.fixture(scope="module")
def data():
    return simulate_dataset(SimScenario(n_curves=250, c=0.6, seed=41), 0)


class TestFunctionalPCA:
    def test_matches_functional_api(self, data):
        est = FunctionalPCA(n_components=3).fit(data.curves)
        basis = compute_fpca(data, 3)
        np.testing.assert_array_equal(est.components_, basis.eigenfunctions)
        np.testing.assert_array_equal(est.eigenvalues_, basis.eigenvalues)
        assert est.n_components_ == 3

    def test_transform_roundtrip(self, data):
        est = FunctionalPCA(n_components=3).fit(data.curves)
        scores = est.transform(data.curves)
        np.testing.assert_allclose(scores.var(axis=0), est.eigenvalues_, rtol=1e-8)
        proj = est.inverse_transform(scores)
        np.testing.assert_allclose(est.transform(proj), scores, atol=1e-10)

    def test_auto_components(self, data):
        est = FunctionalPCA().fit(data.curves)
        assert est.n_components_ == 2
        assert est.explained_variance_ratio_.sum() >= 0.85

    def test_params(self):
        est = FunctionalPCA(n_components=2, variance_threshold=0.9)
        assert est.get_params() == {"n_components": 2, "variance_threshold": 0.9, "grid": None}
        assert clone(est).get_params() == est.get_params()

    def test_not_fitted(self, data):
        with pytest.raises(NotFittedError):
            FunctionalPCA().transform(data.curves)

    def test_bad_params(self, data):
        with pytest.raises(InvalidArgumentError):
            FunctionalPCA(n_components=0).fit(data.curves)
        with pytest.raises(InvalidArgumentError):
            FunctionalPCA(variance_threshold=1.5).fit(data.curves)

    def test_grid_length_checked(self, data):
        with pytest.raises(InvalidArgumentError):
            FunctionalPCA(grid=np.linspace(0, 1, 7)).fit(data.curves)

    def test_in_pipeline(self, data):
        pipe = make_pipeline(FunctionalPCA(n_components=2), LinearRegression())
        pipe.fit(data.curves, data.responses)
        assert pipe.predict(data.curves[:3]).shape == (3,)


class TestQuadraticSignificanceTest:
    def test_matches_run_test(self, data):
        est = QuadraticSignificanceTest(n_components=2).fit(data.curves, data.responses)
        res = run_test(data, p=2)
        assert est.u_statistic_ == res.u_stat
        assert est.p_value_ == res.p_value
        assert est.dof_ == 3
        assert est.reject_

    def test_predict_is_fitted_values(self, data):
        est = QuadraticSignificanceTest(n_components=2).fit(data.curves, data.responses)
        np.testing.assert_allclose(est.predict(data.curves), est.result_.fit.fitted_values(), rtol=1e-12)
        assert 0 < est.score(data.curves, data.responses) <= 1

    def test_coefficients_symmetric(self, data):
        est = QuadraticSignificanceTest(n_components=3).fit(data.curves, data.responses)
        np.testing.assert_array_equal(est.coef_quadratic_, est.coef_quadratic_.T)

    def test_response_length(self, data):
        with pytest.raises(InvalidArgumentError):
            QuadraticSignificanceTest().fit(data.curves, data.responses[:-1])

    def test_non_finite_input(self, data):
        x = data.curves.copy()
        x[0, 0] = np.nan
        with pytest.raises(ValueError):
            QuadraticSignificanceTest().fit(x, data.responses)

    def test_explicit_grid(self, data):
        grid = 850 + 200 * data.grid.points
        a = QuadraticSignificanceTest(n_components=2, grid=grid).fit(data.curves, data.responses)
        b = QuadraticSignificanceTest(n_components=2).fit(data.curves, data.responses)
        assert a.u_statistic_ == pytest.approx(b.u_statistic_, rel=1e-8)
