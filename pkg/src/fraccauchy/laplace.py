"""Numerical inversion of Laplace transforms on deformed Bromwich contours.

Two contours are available:

* the optimized Talbot contour of Weideman (2006),
  ``s(theta) = (N/t) * (sigma + mu*theta*cot(a*theta) + i*nu*theta)``, used for
  transforms that stay bounded on the whole cut plane;
* a hyperbola ``s(u) = mu * (1 + sin(i*u - alpha))`` whose asymptotic opening
  angle is chosen to fit inside a sector ``|arg s| < sector``. It is used for
  transforms such as ``exp(-l*psi(s))`` that blow up once ``Re psi(s) < 0``.

Both rules are trapezoid/midpoint sums, so the result is a deterministic
function of ``(t, nodes)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "BranchCutError",
    "InversionError",
    "TransformHandle",
    "complex_power",
    "invert",
    "T_MIN",
    "DEFAULT_NODES",
]

T_MIN = 1e-8
DEFAULT_NODES = 32

# Weideman's optimized Talbot parameters.
_SIGMA, _MU, _ALPHA, _NU = -0.6122, 0.5017, 0.6407, 0.2645


class BranchCutError(ValueError):
    """Raised when a complex argument lies on the cut ``(-inf, 0]``."""


class InversionError(RuntimeError):
    """Raised when a transform evaluation fails on the contour."""

    def __init__(self, message, s=None):
        super().__init__(message)
        self.s = s


def complex_power(s, beta):
    """Principal branch ``s**beta = |s|**beta * exp(i*beta*arg s)``.

    ``s`` may be a scalar or an array; any point on ``(-inf, 0]`` raises
    :class:`BranchCutError` naming the first offending value.
    """
    s = np.asarray(s, dtype=complex)
    on_cut = (s.imag == 0.0) & (s.real <= 0.0)
    if np.any(on_cut):
        bad = s[on_cut].flat[0] if s.ndim else s
        raise BranchCutError(f"s={complex(bad)!r} lies on the branch cut (-inf, 0]")
    out = np.exp(beta * np.log(s))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class TransformHandle:
    """A Laplace-space function ``F(s)`` plus what the inverter needs to know.

    ``evaluator`` maps an array of complex ``s`` (never on the cut) to an array
    whose leading dimensions match ``s``; extra trailing dimensions are carried
    through, which lets one inversion handle a whole family of transforms.
    ``decay`` is the algebraic order of decay of ``|F(s)|`` at infinity and is
    informational. ``sector`` is the half-angle of the region ``|arg s| <
    sector`` on which ``F`` stays bounded; anything below ``pi`` switches the
    inverter to a hyperbolic contour that fits in that sector.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    decay: float = 1.0
    sector: float = math.pi

    def __call__(self, s):
        return self.evaluator(s)


def _as_handle(F):
    return F if isinstance(F, TransformHandle) else TransformHandle(F)


def _talbot_nodes(nodes, t):
    # midpoint rule in theta on (-pi, pi); only theta >= 0 is needed by symmetry
    theta = -np.pi + (np.arange(nodes) + 0.5) * (2 * np.pi / nodes)
    theta = theta[theta >= 0]
    weights = np.where(theta == 0.0, 1.0, 2.0) / nodes
    with np.errstate(divide="ignore", invalid="ignore"):
        cot = 1.0 / np.tan(_ALPHA * theta)
        z = _SIGMA + _MU * theta * cot + 1j * _NU * theta
        dz = _MU * cot - _MU * _ALPHA * theta / np.sin(_ALPHA * theta) ** 2 + 1j * _NU
    zero = theta == 0.0
    z[zero] = _SIGMA + _MU / _ALPHA
    dz[zero] = 1j * _NU
    scale = nodes / t[..., None]
    return z * scale, dz * scale, weights


def _hyperbola_rate(alpha, d, a):
    denom = math.sin(alpha) * math.cosh(a) - 1.0
    if denom <= 0:
        return -math.inf
    return (2 * math.pi * d / a) / (1.0 + (1.0 - math.sin(alpha - d)) / denom)


@lru_cache(maxsize=64)
def _hyperbola_params(sector):
    """Return ``(alpha, a, m, rho)`` maximizing the convergence rate ``rho``.

    The strip of analyticity in ``u`` has half-width ``d`` and maps onto the
    hyperbolas with parameters in ``(alpha-d, alpha+d)``; we need
    ``alpha - d >= 0`` for decay of ``exp(st)`` and ``pi/2 + alpha + d <=
    sector`` for boundedness of ``F``. ``h = a/N`` and ``mu*t = m*N``.
    """
    budget = min(sector, math.pi - 1e-3) - math.pi / 2
    if budget <= 0.02:
        raise ValueError(f"sector {sector} leaves no room for a hyperbolic contour")
    best = (-math.inf, 0.0, 0.0)
    half = budget / 2
    for frac in np.linspace(0.3, 1.0, 29):
        d = half * frac
        alpha = budget - d
        for a in np.linspace(0.5, 8.0, 301):
            rho = _hyperbola_rate(alpha, d, a)
            if rho > best[0]:
                best = (rho, alpha, a)
    rho, alpha, a = best
    m = rho / (math.sin(alpha) * math.cosh(a) - 1.0)
    return alpha, a, m, rho


def _hyperbola_nodes(nodes, t, sector):
    alpha, a, m, rho = _hyperbola_params(round(float(sector), 12))
    # match the Talbot accuracy budget: Talbot converges like exp(-1.36 N)
    n = max(nodes, int(math.ceil(1.36 * nodes / rho)))
    h = a / n
    u = np.arange(n + 1) * h
    mu = m * n / t[..., None]
    z = 1.0 + np.sin(1j * u - alpha)
    dz = 1j * np.cos(1j * u - alpha)
    weights = np.where(u == 0.0, 0.5, 1.0) * h / np.pi
    return mu * z, mu * dz, weights


def invert(F, t, nodes=DEFAULT_NODES):
    """Approximate the inverse Laplace transform of ``F`` at time(s) ``t``.

    ``F`` is a :class:`TransformHandle` or a plain callable (treated as
    bounded on the whole cut plane). ``t`` may be a scalar or 1-D array; any
    trailing dimensions produced by the evaluator are kept, so the result has
    shape ``t.shape + extra``.

    Transforms with ``F(conj s) = conj F(s)`` give real inverses, which is
    what this routine returns.
    """
    F = _as_handle(F)
    if nodes < 8:
        raise ValueError("nodes must be at least 8")
    t_arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t_arr)) or np.any(t_arr < T_MIN):
        raise ValueError(f"inversion time must be >= {T_MIN}, got {t!r}")
    if F.sector >= math.pi:
        s, ds, w = _talbot_nodes(nodes, t_arr)
    else:
        s, ds, w = _hyperbola_nodes(nodes, t_arr, F.sector)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(F(s))
    except BranchCutError:
        raise
    except Exception as exc:  # evaluator blew up: report where
        raise InversionError(f"transform evaluation failed: {exc}", s=s) from exc
    extra = vals.ndim - s.ndim
    if vals.shape[: s.ndim] != s.shape:
        raise InversionError(
            f"evaluator returned shape {vals.shape}, expected leading {s.shape}", s=s
        )
    expand = (...,) + (None,) * extra
    kernel = (np.exp(s * t_arr[..., None]) * ds * w)[expand]
    terms = kernel * vals
    if not np.all(np.isfinite(terms)):
        bad = s[~np.all(np.isfinite(terms).reshape(s.shape + (-1,)), axis=-1)]
        raise InversionError("non-finite transform value on the contour", s=bad)
    out = terms.imag.sum(axis=t_arr.ndim)
    return out[()] if out.ndim == 0 else out
