"""Discrete fractional derivatives on uniform grids and equation residuals.

Caputo derivatives use the L1 scheme (piecewise-linear ``u``, exact kernel
integrals). The Riemann-Liouville derivative differentiates the product
trapezoid approximation of the order ``1 - beta`` fractional integral with a
second-order backward difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma

from .measures import DistributedOrderMeasure, SubordinatorSpec

__all__ = [
    "TimeSeries",
    "ResidualReport",
    "caputo",
    "riemann_liouville",
    "distributed_derivative",
    "extended_derivative",
    "residual",
    "residual_study",
]

MAX_RESIDUAL_DT = 1e-3
MIN_RESIDUAL_T = 0.1


@dataclass(frozen=True)
class TimeSeries:
    """Samples ``u(t0 + k dt)``; for inputs ``t0 = 0`` and ``samples[0]`` is ``u(0)``."""

    dt: float
    samples: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1 or s.size < 3:
            raise ValueError("a time series needs at least 3 samples")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, fn: Callable, dt, t_end):
        n = int(round(t_end / dt))
        t = np.arange(n + 1) * dt
        return cls(dt, np.asarray(fn(t), dtype=float) * np.ones_like(t))

    @property
    def t(self):
        return self.t0 + np.arange(self.samples.size) * self.dt

    def at(self, t):
        """Sample nearest to ``t``."""
        k = int(round((t - self.t0) / self.dt))
        return float(self.samples[k])

    def __len__(self):
        return self.samples.size


def _check_beta(beta):
    if not 0.0 < beta < 1.0:
        raise ValueError(f"derivative order must lie in (0,1), got {beta}")


def _require_origin(series):
    if series.t0 != 0.0:
        raise ValueError("derivatives need a series starting at t = 0")


def caputo(series: TimeSeries, beta) -> TimeSeries:
    """L1 approximation of the order-``beta`` Caputo derivative at ``t_k, k >= 1``."""
    _check_beta(beta)
    _require_origin(series)
    du = np.diff(series.samples)
    k = np.arange(du.size, dtype=float)
    b = (k + 1.0) ** (1.0 - beta) - k ** (1.0 - beta)
    conv = np.convolve(b, du)[: du.size]
    scale = series.dt ** (-beta) / gamma(2.0 - beta)
    return TimeSeries(series.dt, scale * conv, t0=series.dt)


def _fractional_integral(series, alpha):
    """Product-trapezoid ``I^alpha u`` at every node (``I_0 = 0``)."""
    u = series.samples
    n = np.arange(u.size, dtype=float)
    p = alpha + 1.0
    k = n[1:]
    w = np.empty(u.size)
    w[0] = 1.0
    w[1:] = (k + 1.0) ** p - 2.0 * k**p + (k - 1.0) ** p
    # weight of u_0 at node n: (n-1)^p - (n - p) n^alpha
    a0 = np.maximum(n - 1.0, 0.0) ** p - (n - p) * n**alpha
    a0[0] = 0.0
    conv = np.convolve(w, u[1:] if u.size > 1 else u[:0])[: u.size - 1]
    out = np.zeros(u.size)
    out[1:] = a0[1:] * u[0] + conv
    return out * series.dt**alpha / gamma(alpha + 2.0)


def riemann_liouville(series: TimeSeries, beta) -> TimeSeries:
    """``d/dt`` of ``(1/Gamma(1-beta)) int_0^t u(r) (t-r)^{-beta} dr`` at ``t_k, k >= 1``."""
    _check_beta(beta)
    _require_origin(series)
    integral = _fractional_integral(series, 1.0 - beta)
    dt = series.dt
    out = np.empty(integral.size - 1)
    out[0] = (integral[1] - integral[0]) / dt
    out[1:] = (3.0 * integral[2:] - 4.0 * integral[1:-1] + integral[:-2]) / (2.0 * dt)
    return TimeSeries(dt, out, t0=dt)


def _atoms(measure):
    if isinstance(measure, SubordinatorSpec):
        measure = measure.measure
    if not isinstance(measure, DistributedOrderMeasure):
        raise TypeError("expected a DistributedOrderMeasure or SubordinatorSpec")
    return list(zip(measure.betas, measure.mu_weights))


def distributed_derivative(series: TimeSeries, measure) -> TimeSeries:
    """``sum_j mu_j * caputo(u, beta_j)`` over the atoms of the measure."""
    atoms = _atoms(measure)
    total = None
    for beta, mu in atoms:
        term = caputo(series, beta).samples
        term = term if mu == 1.0 else mu * term
        total = term if total is None else total + term
    return TimeSeries(series.dt, total, t0=series.dt)


def extended_derivative(series: TimeSeries, measure) -> TimeSeries:
    """Riemann-Liouville form minus the initial-value terms ``t^{-beta} u(0) / Gamma(1-beta)``."""
    total = 0.0
    t = None
    for beta, mu in _atoms(measure):
        rl = riemann_liouville(series, beta)
        t = rl.t
        total = total + mu * (rl.samples - t ** (-beta) * series.samples[0] / gamma(1.0 - beta))
    return TimeSeries(series.dt, total, t0=series.dt)


@dataclass
class ResidualReport:
    """Max residual of ``sum mu_j d^{beta_j} g + lambda g`` on ``[t_min, t_max]``."""

    max_residual: float
    dt: float
    t_min: float
    t_max: float
    lam: float
    levels: list = field(default_factory=list)
    order: Optional[float] = None

    def as_dict(self):
        return {
            "max_residual": self.max_residual,
            "dt": self.dt,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "lambda": self.lam,
            "levels": [list(x) for x in self.levels],
            "order": self.order,
        }


def residual(spec, lam, solution: TimeSeries, t_min=MIN_RESIDUAL_T, t_max=5.0) -> ResidualReport:
    """Pointwise residual of the eigenmode equation on the window ``[t_min, t_max]``."""
    if solution.dt > MAX_RESIDUAL_DT * (1 + 1e-12):
        raise ValueError(f"insufficient resolution: dt={solution.dt} > {MAX_RESIDUAL_DT}")
    if t_min < MIN_RESIDUAL_T:
        raise ValueError(f"t_min must be >= {MIN_RESIDUAL_T}")
    deriv = distributed_derivative(solution, spec)
    g = solution.samples[1:]
    t = deriv.t
    window = (t >= t_min - 1e-12) & (t <= t_max + 1e-12)
    if not np.any(window):
        raise ValueError("residual window contains no grid points")
    r = np.abs(deriv.samples[window] + lam * g[window])
    return ResidualReport(float(r.max()), solution.dt, t_min, t_max, lam)


def residual_study(spec, lam, solution_fn=None, dt=1e-3, levels=3, t_min=MIN_RESIDUAL_T, t_max=5.0):
    """Residuals at ``dt, dt/2, ...`` and the observed order from the last halving.

    ``solution_fn(t_array)`` defaults to the Laplace-inversion mode solution;
    ``g(0) = 1`` is used at the origin.
    """
    if solution_fn is None:
        from .solver import mode_solution

        def solution_fn(t):
            return mode_solution(spec, lam, t)

    rows = []
    for i in range(levels):
        h = dt / 2**i
        n = int(round(t_max / h))
        t = np.arange(1, n + 1) * h
        samples = np.concatenate([[1.0], np.asarray(solution_fn(t), dtype=float)])
        rep = residual(spec, lam, TimeSeries(h, samples), t_min, t_max)
        rows.append((h, rep.max_residual))
    order = None
    if len(rows) >= 2 and rows[-1][1] > 0 and rows[-2][1] > 0:
        order = math.log2(rows[-2][1] / rows[-1][1])
    return ResidualReport(rows[0][1], dt, t_min, t_max, lam, rows, order)
