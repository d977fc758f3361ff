"""Mixture continuous-time random walk and its inverse-subordinator limit.

Waiting times are drawn by first choosing an exponent ``B = beta_j`` with
probability proportional to ``nu_j`` and then ``J = (c U)**(-1/B)`` with ``U``
uniform on (0, 1], so that ``P(J > u | B) = u**(-B) / c`` for ``u >=
c**(-1/B)``. The rescaled jump count ``N_t / c`` approaches ``E_psi(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import DistributedOrderMeasure, SubordinatorSpec
from .rng import map_blocks, stream
from .subordinate import inverse_mean, sample_inverse

__all__ = [
    "CtrwConfig",
    "KsReport",
    "RenewalCounts",
    "sample_waiting_time",
    "count_jumps",
    "ks_distance",
    "ks_critical",
    "scaling_check",
    "convergence_study",
    "mean_growth_slope",
]

# elements per simulated batch (paths x waiting times)
_BATCH_ELEMENTS = 1 << 21


def _measure(nu):
    if isinstance(nu, SubordinatorSpec):
        return nu.measure
    if not isinstance(nu, DistributedOrderMeasure):
        raise TypeError("nu must be a DistributedOrderMeasure")
    return nu


@dataclass(frozen=True)
class CtrwConfig:
    nu: DistributedOrderMeasure
    c: float
    t: float = 1.0

    def __post_init__(self):
        _measure(self.nu)
        if not self.c >= 1.0:
            raise ValueError(f"scale c must be >= 1, got {self.c}")
        if not self.t > 0:
            raise ValueError("horizon t must be positive")


def _waiting_times(cum_prob, inv_betas, log_c, gen, size):
    j = np.searchsorted(cum_prob, gen.random(size), side="right")
    j = np.minimum(j, inv_betas.size - 1)
    u = 1.0 - gen.random(size)  # (0, 1]
    return np.exp(-(log_c + np.log(u)) * inv_betas[j])


def _tables(nu):
    m = _measure(nu)
    cum = np.cumsum(m.mixing_probabilities())
    cum[-1] = 1.0
    return cum, 1.0 / np.asarray(m.betas)


def sample_waiting_time(nu, c, gen, size=None):
    """Waiting-time draws ``J`` of the mixture walk at scale ``c``."""
    if not c >= 1.0:
        raise ValueError(f"scale c must be >= 1, got {c}")
    cum, inv_b = _tables(nu)
    n = 1 if size is None else size
    out = _waiting_times(cum, inv_b, math.log(c), gen, n)
    return float(out[0]) if size is None else out


@dataclass
class RenewalCounts:
    """Jump counts per path and horizon, with the bracketing renewal epochs."""

    counts: np.ndarray
    t: np.ndarray
    epoch_before: np.ndarray
    epoch_after: np.ndarray


def _count_block(cum, inv_b, log_c, horizons, gen, n):
    t_max = horizons.max()
    counts = np.zeros((n, horizons.size), dtype=np.int64)
    before = np.zeros((n, horizons.size))
    after = np.full((n, horizons.size), np.nan)
    total = np.zeros(n)
    active = np.arange(n)
    width = 64
    while active.size:
        m = max(1, min(width, _BATCH_ELEMENTS // active.size))
        waits = _waiting_times(cum, inv_b, log_c, gen, active.size * m).reshape(active.size, m)
        waits[:, 0] += total[active]
        epochs = np.cumsum(waits, axis=1)  # sequential partial sums T(n)
        for k, h in enumerate(horizons):
            n_le = (epochs <= h).sum(axis=1)
            rows = active
            counts[rows, k] += n_le
            hit = n_le > 0
            before[rows[hit], k] = epochs[hit, n_le[hit] - 1]
            cross = (n_le < m) & np.isnan(after[rows, k])
            after[rows[cross], k] = epochs[cross, n_le[cross]]
        total[active] = epochs[:, -1]
        active = active[epochs[:, -1] <= t_max]
        width = min(width * 2, 1 << 14)
    return counts, before, after


def count_jumps(nu, c, t, n_paths=1, seed=0, threads=1, return_epochs=False):
    """``N_t = max{n : T(n) <= t}`` per path, by sequential summation.

    ``t`` may be an array of horizons; all horizons share each path, so
    counts are nondecreasing in ``t`` path by path. Output shape is
    ``(n_paths,) + shape(t)``.
    """
    if not c >= 1.0:
        raise ValueError(f"scale c must be >= 1, got {c}")
    horizons = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(horizons <= 0):
        raise ValueError("horizons must be positive")
    cum, inv_b = _tables(nu)
    log_c = math.log(c)
    parts = map_blocks(
        lambda gen, size: _count_block(cum, inv_b, log_c, horizons, gen, size),
        n_paths, seed, "ctrw-count", threads,
    )
    counts = np.concatenate([p[0] for p in parts])
    shape = (n_paths,) + np.shape(t)
    if not return_epochs:
        return counts.reshape(shape)
    before = np.concatenate([p[1] for p in parts]).reshape(shape)
    after = np.concatenate([p[2] for p in parts]).reshape(shape)
    return RenewalCounts(counts.reshape(shape), horizons, before, after)


def ks_distance(a, b):
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|``."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical(n, m, level=0.01):
    """Asymptotic two-sample critical value ``c(level) sqrt((n + m)/(n m))``."""
    coef = math.sqrt(-0.5 * math.log(level / 2.0))
    return coef * math.sqrt((n + m) / (n * m))


@dataclass
class KsReport:
    statistic: float
    critical: float
    n: int
    median_ratio: float = math.nan

    @property
    def passed(self):
        return self.statistic <= self.critical


def scaling_check(beta, c_factor, t, n, seed=0):
    """KS distance between draws of ``E(c t)`` and ``c**beta E(t)`` (single atom)."""
    spec = SubordinatorSpec.from_mu_weights([(beta, 1.0)])
    a = sample_inverse(spec, c_factor * t, stream(seed, "scaling-ct"), n)
    b = c_factor**beta * sample_inverse(spec, t, stream(seed, "scaling-t"), n)
    ratio = float(np.median(a) / np.median(b))
    return KsReport(ks_distance(a, b), ks_critical(n, n), n, ratio)


def convergence_study(nu, cs, t=1.0, n_paths=10_000, n_ref=100_000, reps=1, seed=0, threads=1):
    """KS distances between ``N_t / c`` and ``E_psi(t)`` for each scale in ``cs``.

    Returns an array of shape ``(len(cs), reps)``. The reference sample is
    drawn once per repetition from the exact inverse sampler.
    """
    spec = SubordinatorSpec(_measure(nu))
    out = np.zeros((len(cs), reps))
    for r in range(reps):
        ref = sample_inverse(spec, t, stream(seed, "ctrw-reference", r), n_ref)
        for i, c in enumerate(cs):
            sub = int(np.random.SeedSequence([int(seed), r, i]).generate_state(1)[0])
            counts = count_jumps(nu, c, t, n_paths, seed=sub, threads=threads)
            out[i, r] = ks_distance(counts / c, ref)
    return out


def mean_growth_slope(spec, t_grid):
    """Least-squares log-log slope of ``E[E_psi(t)]`` over ``t_grid``."""
    t_grid = np.asarray(t_grid, dtype=float)
    means = np.array([inverse_mean(spec, t) for t in t_grid])
    slope = np.polyfit(np.log(t_grid), np.log(means), 1)[0]
    return float(slope), means
