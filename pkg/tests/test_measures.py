import math

import numpy as np
import pytest
from scipy.special import gamma

from fraccauchy.measures import (
    DistributedOrderMeasure,
    MeasureError,
    SubordinatorSpec,
    discretize,
    levy_tail,
    measure_from_literal,
    psi_eval,
    validate,
)


def test_psi_sqrt_at_four():
    spec = SubordinatorSpec.from_mu_weights([(0.5, 1.0)])
    assert psi_eval(spec, 4.0) == pytest.approx(2.0, rel=1e-15)


def test_psi_two_term_at_one(two_term):
    assert psi_eval(two_term, 1.0) == pytest.approx(2.0, rel=1e-15)


def test_psi_principal_branch_at_i(half):
    val = psi_eval(half, 1j)
    assert val == pytest.approx(math.sqrt(2) / 2 * (1 + 1j), abs=1e-15)


def test_psi_rejects_cut(half):
    with pytest.raises(ValueError):
        psi_eval(half, -1.0)


@pytest.mark.parametrize(
    "atoms,t,expected",
    [([(0.5, 1.0)], 4.0, 0.5), ([(0.3, 0.5), (0.7, 0.5)], 1.0, 1.0), ([(0.5, 1.0)], 0.25, 2.0)],
)
def test_levy_tail_examples(atoms, t, expected):
    spec = SubordinatorSpec.from_nu_weights(atoms)
    assert levy_tail(spec, t) == pytest.approx(expected, rel=1e-14)


def test_mu_weights_are_gamma_scaled():
    m = DistributedOrderMeasure.from_atoms([(0.3, 0.5), (0.7, 2.0)])
    assert m.mu_weights[0] == pytest.approx(gamma(0.7) * 0.5)
    assert m.mu_weights[1] == pytest.approx(gamma(0.3) * 2.0)


def test_two_term_mu_weights_exact():
    spec = SubordinatorSpec.two_term(1.5, 0.2, 0.25, 0.9)
    assert spec.mu_weights.tolist() == [1.5, 0.25]
    s = np.logspace(-3, 3, 25)
    assert np.allclose(psi_eval(spec, s), 1.5 * s**0.2 + 0.25 * s**0.9, rtol=1e-15, atol=0)


def test_validate_single_atom():
    rep = validate(DistributedOrderMeasure.from_atoms([(0.5, 1.0)]))
    assert rep.valid and rep.mu_bound_sum == pytest.approx(2.0)


def test_validate_reports_boundary_beta():
    rep = validate([(1.0, 1.0)])
    assert not rep.valid
    assert any("outside the open interval (0,1)" in v for v in rep.violations)


def test_validate_reports_negative_weight():
    rep = validate([(0.5, -1.0)])
    assert not rep.valid
    assert any("nonpositive weight" in v for v in rep.violations)


def test_validate_collects_all_violations():
    rep = validate([(1.2, 1.0), (0.5, -1.0), (0.5, 2.0)])
    assert len(rep.violations) >= 3


def test_validate_epsilon_margin_and_cap():
    assert not validate([(1e-8, 1.0)]).valid
    assert not validate([(0.5, 1e9)]).valid


def test_constructor_rejects_invalid():
    with pytest.raises(MeasureError):
        DistributedOrderMeasure.from_atoms([(0.5, 1.0), (0.5, 1.0)])
    with pytest.raises(MeasureError):
        SubordinatorSpec(DistributedOrderMeasure.from_atoms([(0.5, 1.0)]), drift=0.1)


def test_discretize_single_node():
    m = discretize(lambda b: np.ones_like(b), 1)
    assert m.betas == (0.5,) and m.nu_weights[0] == pytest.approx(1.0, abs=1e-15)


def test_discretize_uniform_mass():
    m = discretize(lambda b: np.ones_like(b), 20)
    assert abs(m.total_nu - 1.0) <= 1e-12


def test_discretize_linear_mass():
    # analytic integral of 2 beta over (0,1) is 1
    m = discretize(lambda b: 2.0 * b, 20)
    assert abs(m.total_nu - 1.0) <= 1e-10


def test_discretize_mu_weights():
    m = discretize(lambda b: np.ones_like(b), 10, weight="mu")
    assert abs(m.total_mu - 1.0) <= 1e-12


def test_psi_monotone_and_sublinear():
    spec = SubordinatorSpec(discretize(lambda b: np.ones_like(b), 8))
    s = np.logspace(-4, 6, 60)
    vals = psi_eval(spec, s)
    assert np.all(np.diff(vals) > 0)
    ratio = vals / s
    assert np.all(np.diff(ratio[s > 1]) < 0) and ratio[-1] < ratio[0]


def test_levy_tail_decreasing_and_blows_up():
    spec = SubordinatorSpec.from_nu_weights([(0.3, 0.5), (0.7, 0.5)])
    t = np.logspace(-8, 4, 50)
    vals = levy_tail(spec, t)
    assert np.all(np.diff(vals) < 0)
    assert vals[0] > 1e5


def test_measure_literals():
    assert measure_from_literal([{"beta": 0.5, "nu_weight": 1.0}]).nu_weights == (1.0,)
    assert measure_from_literal([[0.4, 1.0], [0.8, 2.0]]).betas == (0.4, 0.8)
    assert measure_from_literal([{"beta": 0.4, "mu_weight": 1.0}]).mu_weights == (1.0,)
    assert measure_from_literal({"kind": "uniform", "n": 5}).n_atoms == 5
    with pytest.raises(MeasureError):
        measure_from_literal([{"beta": 1.2, "nu_weight": 1.0}])
    with pytest.raises(MeasureError):
        measure_from_literal({"kind": "triangular"})
