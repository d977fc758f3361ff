"""Acceptance criteria 1 to 10, each at its stated tolerance and runtime budget.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""

import json
import math
import time

import numpy as np
from scipy.special import gamma

from conftest import ACCEPTANCE_LINES
from fraccauchy.cli import run_scenario
from fraccauchy.config import parse_config
from fraccauchy.ctrw import convergence_study, scaling_check
from fraccauchy.fraccalc import TimeSeries, caputo, residual_study, riemann_liouville
from fraccauchy.measures import DistributedOrderMeasure, SubordinatorSpec, discretize
from fraccauchy.rng import stream
from fraccauchy.semigroup import EigenSemigroup, FractionalLaplacianOp, gaussian_bump
from fraccauchy.solver import mode_solution, subordinate_apply, subordinate_apply_mc
from fraccauchy.special import mittag_leffler
from fraccauchy.subordinate import inverse_density, inverse_density_mc, inverse_mean, sample_inverse


class Check:
    """Collects named conditions for one criterion and records the verdict line."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.failures, self.notes = [], []
        self.start = time.perf_counter()

    def expect(self, ok, what):
        self.notes.append(what)
        if not ok:
            self.failures.append(what)

    def finish(self, budget):
        elapsed = time.perf_counter() - self.start
        self.expect(elapsed < budget, f"runtime {elapsed:.1f}s < {budget}s")
        verdict = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.failures or self.notes)
        ACCEPTANCE_LINES[self.number] = f"criterion {self.number:2d} {verdict}: {self.title} ({detail})"
        print(ACCEPTANCE_LINES[self.number])
        assert not self.failures, detail


def test_criterion_01_mittag_leffler_cross_validation():
    c = Check(1, "mode solution vs Mittag-Leffler")
    t = np.logspace(-2, 1, 20)
    worst = 0.0
    for beta in (0.3, 0.5, 0.8):
        spec = SubordinatorSpec.from_mu_weights([(beta, 1.0)])
        for lam in (0.5, 1.0, 2.0):
            h = mode_solution(spec, lam, t)
            ref = np.array([mittag_leffler(beta, -lam * x**beta) for x in t])
            worst = max(worst, float(np.max(np.abs(h - ref) / np.abs(ref))))
    c.expect(worst <= 1e-8, f"max rel err {worst:.2e} <= 1e-8")
    c.finish(5.0)


def test_criterion_02_three_route_agreement():
    c = Check(2, "Talbot / quadrature / Monte Carlo agreement")
    spec = SubordinatorSpec.two_term(1.0, 0.4, 1.0, 0.8)
    sg = EigenSemigroup(1.0)
    worst_det, worst_z = 0.0, 0.0
    for i, t in enumerate((0.1, 1.0, 5.0)):
        h = mode_solution(spec, 1.0, t)
        q = subordinate_apply(spec, sg, 1.0, t)
        m, se = subordinate_apply_mc(spec, sg, 1.0, t, 100_000, seed=100 + i)
        worst_det = max(worst_det, abs(h - q) / abs(h))
        worst_z = max(worst_z, abs(m - h) / se, abs(m - q) / se)
    c.expect(worst_det <= 1e-4, f"deterministic rel diff {worst_det:.2e} <= 1e-4")
    c.expect(worst_z <= 4.0, f"mc deviation {worst_z:.2f} stderr <= 4")
    c.finish(60.0)


def test_criterion_03_governing_equation_residual():
    c = Check(3, "governing-equation residual")
    cases = {
        "two-term": SubordinatorSpec.two_term(1.0, 0.4, 1.0, 0.8),
        "10-atom uniform nu": SubordinatorSpec(discretize(lambda b: np.ones_like(b), 10)),
    }
    for name, spec in cases.items():
        rep = residual_study(spec, 1.0, dt=1e-3, levels=3, t_min=0.1, t_max=5.0)
        c.expect(rep.max_residual <= 5e-3, f"{name} residual {rep.max_residual:.2e} <= 5e-3")
        c.expect(rep.order >= 1.0, f"{name} order {rep.order:.3f} >= 1.0")
    c.finish(120.0)


def test_criterion_04_density_duality():
    c = Check(4, "density by inversion vs Monte Carlo")
    spec = SubordinatorSpec.from_mu_weights([(0.5, 1.0)])
    table = inverse_density(spec, 1.0)
    c.expect(abs(table.mass - 1.0) <= 1e-4, f"table mass error {abs(table.mass - 1):.1e} <= 1e-4")
    idx = np.unique(np.linspace(0, table.l_grid.size - 1, 41).astype(int))
    l = table.l_grid[idx]
    mc = inverse_density_mc(spec, 1.0, l, 1_000_000, seed=4)
    tol = np.maximum(3.0 * mc.stderr, 0.01)
    excess = float(np.max(np.abs(mc.values - table.values[idx]) - tol))
    c.expect(excess <= 0.0, f"worst |diff| - tol {excess:.2e} <= 0 on {l.size} points")
    c.finish(60.0)


def test_criterion_05_inverse_moment():
    c = Check(5, "mean of E_0.5(1)")
    spec = SubordinatorSpec.from_mu_weights([(0.5, 1.0)])
    draws = sample_inverse(spec, 1.0, stream(5, "criterion-5"), 1_000_000)
    oracle = inverse_mean(spec, 1.0)
    # psi(s) = sqrt(s), so the mean is t^(1/2) / Gamma(3/2) = 2 / sqrt(pi) at t = 1
    c.expect(abs(oracle - 2.0 / math.sqrt(math.pi)) <= 1e-10, f"oracle {oracle:.10f}")
    z = abs(draws.mean() - oracle) / (draws.std(ddof=1) / math.sqrt(draws.size))
    c.expect(z <= 3.0, f"deviation {z:.2f} stderr <= 3")
    c.finish(30.0)


def test_criterion_06_scaling_law():
    c = Check(6, "E(2t) vs 2^beta E(t) in law")
    rep = scaling_check(0.5, 2.0, 1.0, 100_000, seed=6)
    c.expect(rep.statistic <= 0.02, f"KS {rep.statistic:.4f} <= 0.02")
    c.finish(20.0)


def test_criterion_07_ctrw_convergence():
    c = Check(7, "CTRW counts converge to the inverse subordinator")
    nu = DistributedOrderMeasure.from_atoms([(0.3, 0.5), (0.7, 0.5)])
    ks = convergence_study(nu, [1e2, 1e3, 1e4], t=1.0, n_paths=10_000, n_ref=100_000, reps=15, seed=7)
    med = np.median(ks, axis=1)
    c.expect(bool(med[0] > med[1] > med[2]), "median KS " + " > ".join(f"{m:.4f}" for m in med))
    c.expect(float(ks[2].max()) <= 0.05, f"worst KS at c=1e4 {ks[2].max():.4f} <= 0.05")
    c.finish(120.0)


def test_criterion_08_field_corollary():
    c = Check(8, "fractional Laplacian field vs per-mode Mittag-Leffler")
    spec = SubordinatorSpec.from_mu_weights([(0.7, 1.0)])
    op = FractionalLaplacianOp(1.5, 256, 20.0)
    f = gaussian_bump(256, 20.0, 1.0)
    for t in (0.5, 2.0):
        u = subordinate_apply(spec, op, f, t)
        weights = np.array([mittag_leffler(0.7, -r * t**0.7) for r in op.rates()])
        ref = op.apply_modes(f, weights)
        rel = float(np.max(np.abs(u.values - ref.values)) / ref.max_norm())
        c.expect(rel <= 1e-4, f"t={t} rel max-norm err {rel:.1e} <= 1e-4")
        c.expect(u.max_norm() <= f.max_norm() * (1 + 1e-12), f"t={t} max-norm {u.max_norm():.6f} <= initial")
    c.finish(30.0)


def test_criterion_09_fractional_calculus_oracles():
    c = Check(9, "Caputo and Riemann-Liouville unit oracles")
    lin = TimeSeries.from_function(lambda t: t, 1e-4, 1.0)
    err = abs(caputo(lin, 0.5).samples[-1] - 1.0 / gamma(1.5))
    c.expect(err <= 1e-3, f"caputo(t) err {err:.1e} <= 1e-3")
    u = TimeSeries.from_function(lambda t: 1.0 + t * t, 1e-3, 2.0)
    rl, cap = riemann_liouville(u, 0.5), caputo(u, 0.5)
    t = rl.t
    w = (t >= 0.1 - 1e-12) & (t <= 2.0 + 1e-12)
    gap = float(np.max(np.abs(rl.samples - cap.samples - t**-0.5 / gamma(0.5))[w]))
    c.expect(gap <= 2e-3, f"RL - Caputo - singular term {gap:.1e} <= 2e-3")
    c.finish(5.0)


SCENARIOS = {
    "eigen-mc": "atoms: [[0.4, 1.0], [0.8, 1.0]]\nlambda: 1\nt: [0.1, 1, 5]\nmethod: mc\npaths: 20000\nseed: 11\n",
    "field": "atoms: [{beta: 0.7, mu_weight: 1.0}]\nfield: {gamma: 1.5, n: 64, length: 20.0, "
    "initial: {kind: gaussian, width: 1.0}}\nt: [0.5]\n",
    "density-mc": "command: density\natoms: [[0.5, 1.0]]\nt: [1]\nmethod: mc\npaths: 40000\nl_max: 3\nl_num: 16\nseed: 2\n",
    "ctrw": "command: ctrw\natoms: [[0.3, 0.5], [0.7, 0.5]]\nc: 1000\nt: [1]\npaths: 40000\nseed: 5\n",
}


def test_criterion_10_determinism(tmp_path):
    c = Check(10, "byte-identical reruns at any thread count")
    for name, text in SCENARIOS.items():
        blobs = []
        for i, threads in enumerate((1, 1, 4)):
            d = tmp_path / f"{name}-{i}"
            status = run_scenario(parse_config(text), d, threads=threads)
            c.expect(status == 0, f"{name} run {i} exit {status}")
            blobs.append(tuple((d / f).read_bytes() for f in ("result.csv", "manifest.json")))
        c.expect(blobs[0] == blobs[1] == blobs[2], f"{name} identical")
        c.expect(json.loads(blobs[0][1])["seed"] == parse_config(text).seed, f"{name} seed echoed")
    c.finish(math.inf)
