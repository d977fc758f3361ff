"""Reference special functions: Mittag-Leffler and one-sided stable laws.

These are deliberately computed without the Laplace inversion engine so they
can serve as independent oracles for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate

__all__ = [
    "MLParams",
    "ML_SWITCH",
    "mittag_leffler",
    "ml_series",
    "ml_integral",
    "zolotarev_log_a",
    "stable_density",
    "stable_cdf",
]

ML_SWITCH = 5.0


@dataclass(frozen=True)
class MLParams:
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"Mittag-Leffler alpha must lie in (0,1], got {self.alpha}")


def _check(alpha, z):
    MLParams(alpha)
    if not z <= 0.0:
        raise ValueError(f"only z <= 0 is supported, got {z}")


def ml_series(alpha, z):
    """Taylor series ``sum z**k / Gamma(alpha*k + 1)``.

    The alternating terms peak near ``exp(|z|**(1/alpha))`` before decaying, so
    the sum is carried out in extended precision sized to that peak.
    """
    _check(alpha, z)
    if z == 0.0:
        return 1.0
    x = -z
    # log10 of the largest term, estimated from the continuous maximum
    k_peak = max(1.0, x ** (1.0 / alpha) / alpha)
    k_grid = np.arange(0, int(3 * k_peak) + 50)
    logs = k_grid * math.log(x) - np.array([math.lgamma(alpha * k + 1.0) for k in k_grid])
    digits = max(logs.max(), 0.0) / math.log(10.0)
    ctx = mpmath.MPContext()
    ctx.dps = int(digits) + 25
    xz = ctx.mpf(z)
    a = ctx.mpf(alpha)
    total = ctx.mpf(0)
    power = ctx.mpf(1)
    tiny = ctx.mpf(10) ** (-(ctx.dps - 2))
    k = 0
    while True:
        term = power * ctx.rgamma(a * k + 1)
        total += term
        if k > k_peak and abs(term) < tiny * max(abs(total), tiny):
            break
        k += 1
        power *= xz
    return float(total)


def _ml_kernel(u, t, alpha):
    s, c = math.sin(alpha * math.pi), math.cos(alpha * math.pi)
    return math.exp(-t * u ** (1.0 / alpha)) * s / (alpha * math.pi * (u * u + 2.0 * u * c + 1.0))


def ml_integral(alpha, z):
    """Laplace-type integral representation of ``E_alpha(z)`` for ``z <= 0``.

    With ``t = |z|**(1/alpha)``, ``E_alpha(-t**alpha) = int_0^inf exp(-r t)
    K(r) dr`` where the spectral function ``K`` becomes rational after the
    substitution ``r = u**(1/alpha)``.
    """
    _check(alpha, z)
    if alpha == 1.0:
        return math.exp(z)
    t = (-z) ** (1.0 / alpha)
    # the denominator is smallest at u = -cos(alpha*pi) when alpha > 1/2
    split = max(1.0, -math.cos(alpha * math.pi))
    opts = dict(epsabs=1e-15, epsrel=1e-13, limit=400)
    left, _ = integrate.quad(_ml_kernel, 0.0, split, args=(t, alpha), **opts)
    right, _ = integrate.quad(_ml_kernel, split, math.inf, args=(t, alpha), **opts)
    return left + right


def mittag_leffler(alpha, z):
    """``E_alpha(z)`` for ``0 < alpha <= 1`` and real ``z <= 0``."""
    _check(alpha, z)
    if alpha == 1.0:
        return math.exp(z)
    if -z <= ML_SWITCH:
        return ml_series(alpha, z)
    return ml_integral(alpha, z)


def zolotarev_log_a(w, beta):
    """``log a(pi - w)`` for Zolotarev's function of the one-sided stable law.

    ``a(u) = (sin(beta u)/sin u)**(1/(1-beta)) * sin((1-beta) u)/sin(beta u)``
    is increasing on (0, pi); parametrizing by ``w = pi - u`` keeps the blow-up
    at ``u -> pi`` free of cancellation.
    """
    w = np.asarray(w, dtype=float)
    u = np.pi - w
    # sin(x)/x in numpy's normalized-sinc convention, finite at u = 0
    sinc_b = np.sinc(beta * u / np.pi)
    sinc_c = np.sinc((1.0 - beta) * u / np.pi)
    sinc_u = np.where(u < np.pi / 2, np.sinc(u / np.pi), np.sin(w) / np.where(u > 0, u, 1.0))
    log_ratio = np.log(beta * sinc_b) - np.log(sinc_u)
    out = log_ratio / (1.0 - beta) + np.log((1.0 - beta) * sinc_c) - np.log(beta * sinc_b)
    return out[()] if out.ndim == 0 else out


def _log_w_integrand(v, beta, log_x_scale, density):
    # u = pi - exp(-v);  du = exp(-v) dv
    w = min(math.exp(-v), math.pi)
    la = float(zolotarev_log_a(w, beta))
    ax = la + log_x_scale
    if ax > 700.0:
        return 0.0
    e = math.exp(-math.exp(ax))
    if density:
        return math.exp(ax) * e * w
    return e * w


def _stable_integral(beta, x, density):
    if not 0.0 < beta < 1.0:
        raise ValueError(f"stable index must lie in (0,1), got {beta}")
    if x <= 0.0:
        return 0.0
    log_x_scale = -beta / (1.0 - beta) * math.log(x)
    lo = -math.log(math.pi)
    # the integrand in v is a single bump; place a breakpoint near its peak
    # where a(u) * x**(-beta/(1-beta)) ~ 1
    v_peak = (1.0 - beta) * max(-log_x_scale, 0.0) + lo + 1.0
    hi = max(v_peak, lo + 1.0) + 60.0
    pts = sorted({lo, max(lo + 0.5, v_peak), hi})
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = integrate.quad(
            _log_w_integrand, a, b, args=(beta, log_x_scale, density),
            epsabs=0.0, epsrel=1e-12, limit=400,
        )
        total += val
    if density:
        return total * beta / ((1.0 - beta) * math.pi * x)
    return total / math.pi


def stable_density(beta, x):
    """Density ``g_beta(x)`` of ``D(1)`` with ``E exp(-s D(1)) = exp(-s**beta)``.

    Uses Zolotarev's single-integral form

        g(x) = beta / ((1-beta) pi x) * int_0^pi a(u) X exp(-a(u) X) du,
        X = x**(-beta/(1-beta)),

    integrated adaptively.
    """
    return _stable_integral(beta, float(x), density=True)


def stable_cdf(beta, x):
    """``P(D(1) <= x) = (1/pi) int_0^pi exp(-a(u) X) du``."""
    return _stable_integral(beta, float(x), density=False)
