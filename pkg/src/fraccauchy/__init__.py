"""Distributed-order fractional Cauchy problems solved by subordination.

The solution of ``sum_j mu_j d^{beta_j} u = L u`` with ``u(0) = f`` is
``S(t) f = E[T(E_psi(t)) f]``, the classical semigroup ``T`` run at the
inverse of a stable-mixture subordinator. This package evaluates that
representation three ways (density quadrature, Monte Carlo, Laplace
inversion per mode) and checks the results against Mittag-Leffler
functions, discrete fractional derivatives and a random-walk limit.
"""

from .measures import (
    DistributedOrderMeasure,
    MeasureError,
    SubordinatorSpec,
    discretize,
    levy_tail,
    measure_from_literal,
    psi_eval,
    validate,
)
from .laplace import BranchCutError, InversionError, TransformHandle, complex_power, invert
from .special import mittag_leffler, stable_cdf, stable_density
from .subordinate import (
    DensityTable,
    inverse_density,
    inverse_density_mc,
    sample_inverse,
    sample_mixture,
    sample_stable,
)
from .semigroup import EigenMode, EigenSemigroup, FractionalLaplacianOp, GridFunction
from .solver import mode_solution, subordinate_apply, subordinate_apply_mc, two_term_mode_transform
from .fraccalc import TimeSeries, caputo, distributed_derivative, residual, riemann_liouville

__all__ = [
    "DistributedOrderMeasure",
    "MeasureError",
    "SubordinatorSpec",
    "discretize",
    "levy_tail",
    "measure_from_literal",
    "psi_eval",
    "validate",
    "BranchCutError",
    "InversionError",
    "TransformHandle",
    "complex_power",
    "invert",
    "mittag_leffler",
    "stable_cdf",
    "stable_density",
    "DensityTable",
    "inverse_density",
    "inverse_density_mc",
    "sample_inverse",
    "sample_mixture",
    "sample_stable",
    "EigenMode",
    "EigenSemigroup",
    "FractionalLaplacianOp",
    "GridFunction",
    "mode_solution",
    "subordinate_apply",
    "subordinate_apply_mc",
    "two_term_mode_transform",
    "TimeSeries",
    "caputo",
    "distributed_derivative",
    "residual",
    "riemann_liouville",
]
