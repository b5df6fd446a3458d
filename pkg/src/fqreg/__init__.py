"""Significance test for the quadratic term in functional quadratic regression."""

from .estimators import FunctionalPCA, QuadraticSignificanceTest
from .exceptions import (
    ComponentDegenerateError,
    FqregError,
    GridMismatchError,
    InvalidArgumentError,
    IterationError,
    OutOfRangeError,
    ParseError,
    PerfectFitError,
    SingularDesignError,
)
from .fpca import FpcaBasis, FunctionalDataset, choose_p_by_variance, compute_fpca
from .grid import Curve, Grid, inner_product, make_uniform_grid, natural_cubic_spline
from .quadtest import QuadFit, TestResult, fit_quadratic, run_test, u_statistic
from .simulate import PowerRow, SimScenario, run_power_study

__version__ = "0.1.0"

__all__ = [
    "ComponentDegenerateError",
    "Curve",
    "FpcaBasis",
    "FqregError",
    "FunctionalDataset",
    "FunctionalPCA",
    "Grid",
    "GridMismatchError",
    "InvalidArgumentError",
    "IterationError",
    "OutOfRangeError",
    "ParseError",
    "PerfectFitError",
    "PowerRow",
    "QuadFit",
    "QuadraticSignificanceTest",
    "SimScenario",
    "SingularDesignError",
    "TestResult",
    "choose_p_by_variance",
    "compute_fpca",
    "fit_quadratic",
    "inner_product",
    "make_uniform_grid",
    "natural_cubic_spline",
    "run_power_study",
    "run_test",
    "u_statistic",
]
