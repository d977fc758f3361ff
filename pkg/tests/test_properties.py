import math
import warnings

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from fraccauchy.ctrw import ks_distance
from fraccauchy.laplace import complex_power, invert
from fraccauchy.measures import SubordinatorSpec, psi_eval
from fraccauchy.semigroup import FractionalLaplacianOp, gaussian_bump
from fraccauchy.solver import mode_solution
from fraccauchy.subordinate import sample_inverse
from fraccauchy.rng import stream

betas = st.floats(0.05, 0.95)
weights = st.floats(0.1, 5.0)
atoms = st.lists(st.tuples(betas, weights), min_size=1, max_size=4, unique_by=lambda a: round(a[0], 3))


@settings(max_examples=40, deadline=None)
@given(atoms, st.floats(1e-3, 1e3), st.floats(1.01, 10.0))
def test_psi_increasing_positive(ats, s, factor):
    spec = SubordinatorSpec.from_mu_weights(ats)
    lo, hi = psi_eval(spec, s), psi_eval(spec, s * factor)
    assert 0 < lo < hi


@settings(max_examples=40, deadline=None)
@given(st.floats(-3.1, 3.1), st.floats(1e-3, 1e3), betas)
def test_complex_power_principal_branch(theta, r, beta):
    s = r * np.exp(1j * theta)
    p = complex_power(s, beta)
    assert abs(abs(p) - r**beta) <= 1e-12 * r**beta
    assert abs(np.angle(p) - beta * theta) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 4.0), st.floats(0.1, 10.0))
def test_inversion_linear(a, b, rate, t):
    f1 = lambda s: 1.0 / (s + rate)  # noqa: E731
    f2 = lambda s: 1.0 / (s * s + 1.0)  # noqa: E731
    combo = invert(lambda s: a * f1(s) + b * f2(s), t)
    parts = a * invert(f1, t) + b * invert(f2, t)
    assert abs(combo - parts) <= 1e-12 * (1 + abs(a) + abs(b))
    assert abs(invert(f1, t) - math.exp(-rate * t)) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(atoms, st.floats(0.1, 5.0), st.floats(0.05, 10.0))
def test_mode_solution_in_unit_interval(ats, lam, t):
    h = mode_solution(SubordinatorSpec.from_mu_weights(ats), lam, t)
    assert 0.0 < h <= 1.0 + 1e-10


@settings(max_examples=15, deadline=None)
@given(st.floats(0.5, 2.0), st.floats(0.05, 5.0), st.floats(0.2, 1.0))
def test_semigroup_contraction(gamma, l, width):
    n = 64
    op = FractionalLaplacianOp(gamma, n, 2 * math.pi)
    f = gaussian_bump(n, 2 * math.pi, width)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = op.apply(f, l)
    assert np.max(np.abs(out)) <= f.max_norm() * (1 + 1e-12)


@settings(max_examples=15, deadline=None)
@given(atoms, st.integers(0, 2**31 - 1))
def test_inverse_draws_monotone_in_t(ats, seed):
    spec = SubordinatorSpec.from_mu_weights(ats)
    e = sample_inverse(spec, np.array([0.5, 1.0, 4.0]), stream(seed, "prop"), 200)
    assert np.all(e >= 0) and np.all(np.diff(e, axis=1) >= 0)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=30), st.lists(st.floats(-10, 10), min_size=1, max_size=30))
def test_ks_symmetric_bounded(a, b):
    d = ks_distance(a, b)
    assert 0.0 <= d <= 1.0 and d == ks_distance(b, a)
