"""Stable-mixture subordinators, their inverses, and inverse-subordinator densities.

For ``psi(s) = sum_j mu_j s**beta_j`` the subordinator is a sum of independent
scaled stable subordinators,

    D_psi(tau) = sum_j (mu_j tau)**(1/beta_j) S_j    (in law, for fixed tau),

with ``S_j`` unit one-sided stable variables drawn by Kanter's method. The
inverse ``E_psi(t) = inf{tau : D_psi(tau) > t}`` satisfies ``P(E_psi(t) <= l)
= P(D_psi(l) >= t)``, so for a fixed draw of the ``S_j`` the root of
``sum_j (mu_j tau)**(1/beta_j) S_j = t`` has exactly the law of ``E_psi(t)``;
using one draw for several ``t`` gives a coupled, nondecreasing family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .laplace import TransformHandle, invert
from .measures import levy_tail, psi_eval
from .rng import map_blocks, merge_moments
from .special import zolotarev_log_a

__all__ = [
    "DensityTable",
    "PathSample",
    "sample_stable_log",
    "sample_stable",
    "sample_mixture",
    "sample_inverse",
    "sample_path",
    "first_passage",
    "inverse_mean",
    "inverse_cdf",
    "inverse_density",
    "inverse_density_mc",
    "density_sector",
]

_TINY = np.finfo(float).tiny


@dataclass
class DensityTable:
    """Tabulated density of ``E_psi(t)`` on an ``l`` grid."""

    t: float
    l_grid: np.ndarray
    values: np.ndarray
    method: str
    stderr: Optional[np.ndarray] = None

    @property
    def mass(self):
        return float(np.trapezoid(self.values, self.l_grid))

    def check(self, lower=0.99, upper=1.0 + 1e-4):
        # the upper slack absorbs trapezoid error from a nonzero slope at l = 0
        if np.any(self.values < 0):
            raise ValueError("density table has negative values")
        if not lower <= self.mass <= upper:
            raise ValueError(f"density table mass {self.mass:.8f} outside [{lower}, {upper}]")
        return self


@dataclass
class PathSample:
    """One path of ``D_psi`` sampled at the points of ``tau_grid``."""

    tau_grid: np.ndarray
    d_values: np.ndarray
    seed: int


def sample_stable_log(beta, gen, size=None):
    """``log D(1)`` for the unit one-sided stable law ``E exp(-s D) = exp(-s**beta)``.

    Kanter's representation: ``D = (a(U)/W)**((1-beta)/beta)`` with ``U``
    uniform on (0, pi), ``W`` standard exponential and ``a`` Zolotarev's
    function. Logs keep tiny ``beta`` from overflowing.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"stable index must lie in (0,1), got {beta}")
    w = np.pi * (1.0 - gen.random(size))  # pi - U, in (0, pi]
    e = np.maximum(gen.standard_exponential(size), _TINY)
    return (1.0 - beta) / beta * (zolotarev_log_a(w, beta) - np.log(e))


def sample_stable(beta, t, gen, size=None):
    """Draws of ``D(t) = t**(1/beta) D(1)``."""
    if t <= 0:
        raise ValueError("t must be positive")
    with np.errstate(over="ignore"):
        return np.exp(sample_stable_log(beta, gen, size) + math.log(t) / beta)


def _component_logs(spec, gen, size):
    # log of (mu_j)**(1/beta_j) * S_j, one column per atom
    cols = [
        math.log(c) / b + sample_stable_log(b, gen, size)
        for b, c in zip(spec.measure.betas, spec.measure.mu_weights)
    ]
    return np.stack(cols, axis=-1)


def _mixture_log_value(logw, log_tau, inv_beta):
    # log sum_j exp(logw_j + log_tau / beta_j); trailing axis is the atom axis
    terms = logw + log_tau[..., None] * inv_beta
    top = terms.max(axis=-1)
    return top + np.log(np.exp(terms - top[..., None]).sum(axis=-1))


def sample_mixture(spec, t, gen, size=None):
    """Draws of ``D_psi(t) = sum_j (mu_j t)**(1/beta_j) S_j``."""
    if t <= 0:
        raise ValueError("t must be positive")
    n = 1 if size is None else size
    logw = _component_logs(spec, gen, n)
    inv_beta = 1.0 / np.asarray(spec.measure.betas)
    with np.errstate(over="ignore"):
        out = np.exp(_mixture_log_value(logw, np.full(n, math.log(t)), inv_beta))
    return out[0] if size is None else out


def _solve_log_root(logw, log_t, inv_beta, tol=1e-13, max_iter=200):
    """Root ``x`` of ``log sum_j exp(logw_j + x inv_beta_j) = log_t``.

    The left side is convex and increasing in ``x``; Newton started to the
    right of the root converges monotonically.
    """
    # each component alone reaches t later than the sum does
    x = ((log_t[..., None] - logw) / inv_beta).min(axis=-1)
    for _ in range(max_iter):
        terms = logw + x[..., None] * inv_beta
        top = terms.max(axis=-1)
        p = np.exp(terms - top[..., None])
        total = p.sum(axis=-1)
        g = top + np.log(total) - log_t
        slope = (p * inv_beta).sum(axis=-1) / total
        step = g / slope
        x = x - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(x))):
            break
    return x


def sample_inverse(spec, t, gen, size=None):
    """Draws of ``E_psi(t)``; an array ``t`` gives coupled rows per draw.

    Single atom: ``E(t) = (t / (mu**(1/beta) S))**beta`` exactly. Mixtures:
    Newton root of the scaling path at relative tolerance 1e-13 in ``tau``.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr <= 0):
        raise ValueError("t must be positive")
    n = 1 if size is None else size
    logw = _component_logs(spec, gen, n)
    betas = np.asarray(spec.measure.betas)
    log_t = np.log(t_arr)
    if betas.size == 1:
        x = betas[0] * (log_t[None, :] - logw)
    else:
        x = _solve_log_root(logw[:, None, :], np.broadcast_to(log_t, (n, t_arr.size)), 1.0 / betas)
    out = np.exp(x)
    if np.ndim(t) == 0:
        out = out[:, 0]
    return out[0] if size is None else out


def sample_path(spec, tau_grid, gen, seed=0):
    """Exact-in-law values of one ``D_psi`` path on ``tau_grid`` (independent increments)."""
    tau = np.asarray(tau_grid, dtype=float)
    if np.any(np.diff(tau) <= 0) or tau[0] < 0:
        raise ValueError("tau_grid must be ascending and nonnegative")
    steps = np.diff(np.concatenate([[0.0], tau]))
    d = np.zeros_like(tau)
    pos = steps > 0
    inc = np.zeros_like(tau)
    inv_beta = 1.0 / np.asarray(spec.measure.betas)
    logw = _component_logs(spec, gen, int(pos.sum()))
    with np.errstate(over="ignore"):
        inc[pos] = np.exp(_mixture_log_value(logw, np.log(steps[pos]), inv_beta))
    d = np.cumsum(inc)
    return PathSample(tau, d, seed)


def first_passage(path: PathSample, t):
    """First grid time where the path exceeds ``t`` (``inf`` if never)."""
    idx = np.searchsorted(path.d_values, t, side="right")
    return path.tau_grid[idx] if idx < path.tau_grid.size else math.inf


def inverse_mean(spec, t, nodes=32):
    """``E[E_psi(t)]`` by inverting ``1/(s psi(s))``."""
    return invert(lambda s: 1.0 / (s * psi_eval(spec, s)), t, nodes)


def inverse_cdf(spec, t, l, nodes=32):
    """``P(E_psi(t) <= l)`` by inverting ``(1 - exp(-l psi(s)))/s``."""
    l_arr = np.atleast_1d(np.asarray(l, dtype=float))
    H = TransformHandle(
        lambda s: -np.expm1(-l_arr * psi_eval(spec, s)[..., None]) / s[..., None],
        sector=density_sector(spec),
    )
    out = invert(H, t, nodes)
    return out if np.ndim(l) else float(out[0])


def density_sector(spec):
    """Half-angle of the sector where ``Re psi(s) >= 0``."""
    bmax = spec.beta_max
    return math.pi if bmax <= 0.5 else math.pi / (2.0 * bmax)


def _density_values(spec, t, l, nodes):
    l = np.asarray(l, dtype=float)

    def F(s):
        ps = psi_eval(spec, s)[..., None]
        return ps * np.exp(-l * ps) / s[..., None]

    return invert(TransformHandle(F, decay=1.0 - spec.beta_max, sector=density_sector(spec)), t, nodes)


def inverse_density(spec, t, l_grid=None, nodes=32, n_points=401, tail_tol=1e-12):
    """Density of ``E_psi(t)`` from its ``t``-Laplace transform ``psi(s) e^{-l psi(s)}/s``.

    Without ``l_grid`` the grid starts on ``[0, 4 * mean]`` and is extended
    geometrically, keeping its spacing, until the last value drops below
    ``tail_tol`` times the peak; the table's trapezoid mass is then checked.
    A user grid is extended the same way but its mass is not checked.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    auto = l_grid is None
    if auto:
        upper = 4.0 * inverse_mean(spec, t, nodes)
        l_grid = np.linspace(0.0, upper, n_points)
    l_grid = np.asarray(l_grid, dtype=float)
    if l_grid.ndim != 1 or np.any(np.diff(l_grid) <= 0) or l_grid[0] < 0:
        raise ValueError("l_grid must be ascending and nonnegative")
    values = _density_values(spec, t, l_grid, nodes)
    step = l_grid[-1] - l_grid[-2] if l_grid.size > 1 else max(l_grid[-1], 1.0) / 100
    for _ in range(60):
        peak = values.max()
        if abs(values[-1]) <= tail_tol * peak and np.trapezoid(values, l_grid) >= 0.99:
            break
        end = l_grid[-1]
        extra = np.arange(1, int(math.ceil(0.5 * max(end, step) / step)) + 1) * step + end
        l_grid = np.concatenate([l_grid, extra])
        values = np.concatenate([values, _density_values(spec, t, extra, nodes)])
    else:
        raise RuntimeError("density grid extension did not capture the mass")
    # inversion noise around zero in the far tail
    values = np.maximum(values, 0.0)
    table = DensityTable(float(t), l_grid, values, "talbot")
    # a coarse user grid is extended for coverage, but its trapezoid mass is
    # only as good as its spacing, so the mass invariant applies to auto grids
    return table.check() if auto else table


def inverse_density_mc(spec, t, l_grid, n_paths, seed=0, threads=1):
    """Monte Carlo density ``E[phi(t - D_psi(l), inf) 1{D_psi(l) < t}]`` with standard errors.

    The same stable draws are reused across the grid (scaling coupling), which
    leaves each grid point's estimator unbiased.
    """
    if n_paths < 1000:
        raise ValueError("need at least 1000 paths")
    l_grid = np.asarray(l_grid, dtype=float)
    inv_beta = 1.0 / np.asarray(spec.measure.betas)
    log_l = np.log(np.where(l_grid > 0, l_grid, 1.0))
    zero = l_grid == 0

    def block(gen, size):
        logw = _component_logs(spec, gen, size)
        mean = np.zeros(l_grid.size)
        m2 = np.zeros(l_grid.size)
        for lo in range(0, l_grid.size, 64):
            sl = slice(lo, lo + 64)
            with np.errstate(over="ignore"):
                d = np.exp(_mixture_log_value(logw[:, None, :], np.broadcast_to(log_l[sl], (size, log_l[sl].size)), inv_beta))
            d[:, zero[sl]] = 0.0
            gap = t - d
            ok = gap > 0
            val = np.zeros_like(gap)
            val[ok] = levy_tail(spec, gap[ok])
            mean[sl] = val.mean(axis=0)
            m2[sl] = ((val - mean[sl]) ** 2).sum(axis=0)
        return size, mean, m2

    parts = map_blocks(block, n_paths, seed, "inverse-density", threads)
    n, mean, m2 = merge_moments(parts)
    return DensityTable(float(t), l_grid, mean, "levy-tail-mc", np.sqrt(m2 / (n - 1) / n))
