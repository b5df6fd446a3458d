import numpy as np
import pytest

from conftest import brownian_dataset
from fqreg.exceptions import ComponentDegenerateError, InvalidArgumentError
from fqreg.fpca import (
    FunctionalDataset,
    choose_p_by_variance,
    compute_fpca,
    sample_covariance,
    sample_mean,
)
from fqreg.grid import Curve, Grid, inner_product, make_uniform_grid


def _bm_eigen(j, t):
    return 1 / ((j - 0.5) ** 2 * np.pi**2), np.sqrt(2) * np.sin((j - 0.5) * np.pi * t)


class TestDataset:
    def test_needs_two_curves(self):
        with pytest.raises(InvalidArgumentError):
            FunctionalDataset(make_uniform_grid(5), np.zeros((1, 5)), [0.0])

    def test_response_length(self):
        with pytest.raises(InvalidArgumentError):
            FunctionalDataset(make_uniform_grid(5), np.zeros((3, 5)), [0.0, 1.0])

    def test_from_curves(self):
        g = make_uniform_grid(6)
        ds = FunctionalDataset.from_curves([Curve(g, np.ones(6)), Curve(g, np.zeros(6))], [1, 2])
        assert ds.n_curves == 2
        np.testing.assert_array_equal(ds.curve(0).values, 1)


class TestMeanAndCovariance:
    def test_identical_curves(self):
        g = make_uniform_grid(8)
        f = np.sin(g.points)
        ds = FunctionalDataset(g, np.stack([f, f]), [0, 0])
        np.testing.assert_array_equal(sample_mean(ds).values, f)
        np.testing.assert_array_equal(sample_covariance(ds), 0)

    def test_opposite_curves(self):
        g = make_uniform_grid(8)
        f = np.cos(3 * g.points)
        ds = FunctionalDataset(g, np.stack([f, -f]), [0, 0])
        np.testing.assert_allclose(sample_mean(ds).values, 0, atol=1e-16)
        # divisor N: entries are f(t_i) f(t_j)
        np.testing.assert_allclose(sample_covariance(ds), np.outer(f, f), rtol=1e-14)

    def test_brownian_mean_small(self):
        ds = brownian_dataset(1000, seed=1)
        # frozen: 0.0202 with this seed
        assert np.abs(sample_mean(ds).values).max() <= 0.15

    def test_brownian_covariance_is_min(self):
        ds = brownian_dataset(2000, seed=2)
        t = ds.grid.points
        # frozen: max deviation 0.0173 with this seed
        assert np.abs(sample_covariance(ds) - np.minimum.outer(t, t)).max() <= 0.05


class TestComputeFpca:
    def test_rank_one(self):
        g = make_uniform_grid(51)
        f = np.exp(g.points) * np.sin(4 * g.points)
        coef = np.random.default_rng(0).normal(size=30)
        ds = FunctionalDataset(g, 2.0 + np.outer(coef, f), np.zeros(30))
        basis = compute_fpca(ds, 1)
        assert basis.spectrum[1] / basis.spectrum[0] <= 1e-10
        unit = Curve(g, f / np.sqrt(inner_product(Curve(g, f), Curve(g, f))))
        assert abs(inner_product(basis.eigenfunction(0), unit)) == pytest.approx(1, abs=1e-10)
        with pytest.raises(ComponentDegenerateError):
            compute_fpca(ds, 2)

    def test_brownian_karhunen_loeve(self):
        ds = brownian_dataset(2000, seed=2)
        basis = compute_fpca(ds, 3)
        for j in range(1, 4):
            lam, phi = _bm_eigen(j, ds.grid.points)
            assert basis.eigenvalues[j - 1] == pytest.approx(lam, rel=0.10)
            assert abs(inner_product(basis.eigenfunction(j - 1), Curve(ds.grid, phi))) >= 0.95

    @pytest.mark.parametrize(
        "grid",
        [make_uniform_grid(101), Grid(np.linspace(0, 1, 60) ** 2), Grid(np.linspace(850, 1050, 40))],
    )
    def test_quadrature_orthonormal(self, grid):
        rng = np.random.default_rng(5)
        x = np.cumsum(rng.normal(size=(80, len(grid))), axis=1)
        basis = compute_fpca(FunctionalDataset(grid, x, np.zeros(80)), 5)
        gram = (basis.eigenfunctions * grid.weights) @ basis.eigenfunctions.T
        np.testing.assert_allclose(gram, np.eye(5), atol=1e-8)

    def test_spectrum_sum_is_trace(self):
        ds = brownian_dataset(300, seed=9)
        basis = compute_fpca(ds, 2)
        trace = ds.grid.weights @ np.diag(sample_covariance(ds))
        assert basis.spectrum.sum() == pytest.approx(trace, rel=1e-8)

    def test_sign_convention(self):
        ds = brownian_dataset(300, seed=9)
        basis = compute_fpca(ds, 4)
        assert np.all(basis.eigenfunctions @ ds.grid.weights >= 0)

    def test_invariant_to_constant_shift(self):
        ds = brownian_dataset(200, seed=4)
        shifted = FunctionalDataset(ds.grid, ds.curves + np.cos(ds.grid.points), ds.responses)
        a, b = compute_fpca(ds, 3), compute_fpca(shifted, 3)
        np.testing.assert_allclose(a.eigenvalues, b.eigenvalues, rtol=1e-8)
        np.testing.assert_allclose(a.eigenfunctions, b.eigenfunctions, atol=1e-8)

    def test_full_reconstruction(self):
        g = make_uniform_grid(21)
        rng = np.random.default_rng(1)
        ds = FunctionalDataset(g, rng.normal(size=(60, 21)), np.zeros(60))
        basis = compute_fpca(ds, 21)
        centered = ds.curves - basis.mean.values
        scores = centered @ (basis.eigenfunctions * g.weights).T
        recon = scores @ basis.eigenfunctions
        assert np.abs(recon - centered).max() <= 1e-6 * np.abs(centered).max()

    def test_too_many_components(self):
        ds = brownian_dataset(5, seed=0, m=11)
        with pytest.raises(ComponentDegenerateError):
            compute_fpca(ds, 5)
        with pytest.raises(ComponentDegenerateError):
            compute_fpca(ds, 12)

    def test_all_identical_curves(self):
        g = make_uniform_grid(9)
        ds = FunctionalDataset(g, np.ones((4, 9)), np.zeros(4))
        with pytest.raises(ComponentDegenerateError):
            compute_fpca(ds, 1)


class TestChooseP:
    def test_single_component(self):
        assert choose_p_by_variance([1, 0, 0], 0.85) == 1

    def test_three(self):
        assert choose_p_by_variance([0.5, 0.3, 0.2], 0.85) == 3

    def test_brownian_spectrum(self):
        j = np.arange(1, 200_001)
        lam = 1 / ((j - 0.5) ** 2 * np.pi**2)
        # first share 0.8106, two components 0.9006
        assert lam[0] / lam.sum() == pytest.approx(0.8106, abs=1e-4)
        assert choose_p_by_variance(lam, 0.85) == 2

    def test_zero_spectrum(self):
        with pytest.raises(InvalidArgumentError):
            choose_p_by_variance([0, 0, 0])

    def test_increasing_spectrum(self):
        with pytest.raises(InvalidArgumentError):
            choose_p_by_variance([0.1, 0.5])
