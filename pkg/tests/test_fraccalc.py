import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import gamma

from fraccauchy.fraccalc import (
    TimeSeries,
    caputo,
    distributed_derivative,
    extended_derivative,
    residual,
    residual_study,
    riemann_liouville,
)
from fraccauchy.measures import DistributedOrderMeasure, SubordinatorSpec
from fraccauchy.special import mittag_leffler


def caputo_quadrature(du, beta, t):
    """Direct quadrature of (1/Gamma(1-beta)) int_0^t u'(r) (t-r)^(-beta) dr."""
    val = integrate.quad(du, 0, t, weight="alg", wvar=(0.0, -beta))[0]
    return val / gamma(1.0 - beta)


def test_caputo_constant_is_zero():
    s = TimeSeries(0.01, np.full(200, 3.0))
    assert np.all(caputo(s, 0.4).samples == 0.0)


def test_caputo_linear():
    s = TimeSeries.from_function(lambda t: t, 1e-4, 1.0)
    oracle = caputo_quadrature(lambda r: 1.0, 0.5, 1.0)
    assert oracle == pytest.approx(1 / gamma(1.5), rel=1e-12)
    assert abs(caputo(s, 0.5).samples[-1] - oracle) <= 1e-3


def test_caputo_quadratic():
    s = TimeSeries.from_function(lambda t: t * t, 1e-4, 1.0)
    oracle = caputo_quadrature(lambda r: 2.0 * r, 0.5, 1.0)
    assert oracle == pytest.approx(1.5045056, abs=1e-7)
    assert abs(caputo(s, 0.5).samples[-1] - oracle) <= 1e-3


def test_caputo_l1_order():
    # error at t = 1 for u = t^2 shrinks like dt^(2 - beta)
    beta = 0.5
    errs = []
    for dt in (1e-2, 5e-3, 2.5e-3):
        s = TimeSeries.from_function(lambda t: t * t, dt, 1.0)
        errs.append(abs(caputo(s, beta).samples[-1] - 2 / gamma(3 - beta)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - (2 - beta)) < 0.1)


def test_rl_linear_equals_caputo():
    s = TimeSeries.from_function(lambda t: t, 1e-4, 1.0)
    assert abs(riemann_liouville(s, 0.5).samples[-1] - 1 / gamma(1.5)) <= 1e-3


def test_rl_constant_is_singular_term():
    s = TimeSeries.from_function(lambda t: np.ones_like(t), 1e-3, 2.0)
    rl = riemann_liouville(s, 0.5)
    assert abs(rl.at(1.0) - 1 / math.sqrt(math.pi)) <= 1e-3
    t = rl.t
    w = t >= 0.1
    assert np.max(np.abs(rl.samples[w] - t[w] ** -0.5 / gamma(0.5))) <= 1e-3


def test_rl_minus_caputo_relation():
    s = TimeSeries.from_function(lambda t: 1 + t * t, 1e-3, 2.0)
    rl, cap = riemann_liouville(s, 0.5), caputo(s, 0.5)
    t = rl.t
    w = (t >= 0.1 - 1e-12) & (t <= 2.0 + 1e-12)
    gap = rl.samples - cap.samples - t**-0.5 / gamma(0.5)
    assert np.max(np.abs(gap[w])) <= 2e-3


def test_distributed_single_atom_bitwise():
    m = DistributedOrderMeasure.from_mu_weights([(0.35, 1.0)])
    s = TimeSeries.from_function(lambda t: np.sin(3 * t), 1e-3, 1.0)
    assert np.array_equal(distributed_derivative(s, m).samples, caputo(s, 0.35).samples)


def test_distributed_constant_is_zero(two_term):
    s = TimeSeries(0.01, np.full(50, -2.0))
    assert np.all(distributed_derivative(s, two_term).samples == 0.0)


def test_distributed_two_atoms_linear(two_term):
    s = TimeSeries.from_function(lambda t: t, 1e-4, 1.0)
    oracle = caputo_quadrature(lambda r: 1.0, 0.4, 1.0) + caputo_quadrature(lambda r: 1.0, 0.8, 1.0)
    assert oracle == pytest.approx(1 / gamma(1.6) + 1 / gamma(1.2), rel=1e-10)
    assert abs(distributed_derivative(s, two_term).samples[-1] - oracle) <= 2e-3


def test_linearity(two_term):
    rng = np.random.default_rng(0)
    a = TimeSeries(0.01, rng.uniform(-1, 1, 300))
    b = TimeSeries(0.01, rng.uniform(-1, 1, 300))
    ab = TimeSeries(0.01, 2.0 * a.samples - 3.0 * b.samples)
    for op in (lambda s: caputo(s, 0.3), lambda s: riemann_liouville(s, 0.7), lambda s: distributed_derivative(s, two_term)):
        lhs = op(ab).samples
        rhs = 2.0 * op(a).samples - 3.0 * op(b).samples
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))


def test_extended_definition_agrees(two_term):
    s = TimeSeries.from_function(lambda t: np.exp(-t) + t**2, 1e-3, 2.0)
    ext = extended_derivative(s, two_term)
    dd = distributed_derivative(s, two_term)
    w = ext.t >= 0.1
    assert np.max(np.abs(ext.samples[w] - dd.samples[w])) <= 5e-3


def test_residual_single_atom_ml():
    spec = SubordinatorSpec.from_mu_weights([(0.5, 1.0)])
    dt = 1e-3
    t = np.arange(1, 5001) * dt
    g = np.concatenate([[1.0], [mittag_leffler(0.5, -(x**0.5)) for x in t]])
    rep = residual(spec, 1.0, TimeSeries(dt, g), 0.1, 5.0)
    assert rep.max_residual <= 5e-3


def test_residual_zero_lambda_exact(two_term):
    rep = residual(two_term, 0.0, TimeSeries(1e-3, np.ones(5001)))
    assert rep.max_residual == 0.0


def test_residual_two_term_study(two_term):
    rep = residual_study(two_term, 1.0)
    assert rep.max_residual <= 5e-3
    assert rep.order >= 1.0
    res = [r for _, r in rep.levels]
    assert res[0] > res[1] > res[2]


def test_residual_preconditions(two_term):
    with pytest.raises(ValueError, match="insufficient resolution"):
        residual(two_term, 1.0, TimeSeries(1e-2, np.ones(600)))
    with pytest.raises(ValueError):
        residual(two_term, 1.0, TimeSeries(1e-3, np.ones(600)), t_min=0.05)


def test_timeseries_invariants():
    with pytest.raises(ValueError):
        TimeSeries(0.1, np.ones(2))
    with pytest.raises(ValueError):
        TimeSeries(0.0, np.ones(5))
    with pytest.raises(ValueError):
        caputo(TimeSeries(0.1, np.ones(5)), 1.0)
