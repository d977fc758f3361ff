"""Concrete bounded semigroups: scalar eigenmodes and spectral fractional Laplacians.

Every semigroup here exposes ``apply(f, l)`` for an array of times ``l``,
returning ``T(l_i) f`` stacked along a new leading axis. The solver only
relies on that method, so it treats both families the same way.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BandLimitWarning",
    "EigenMode",
    "EigenSemigroup",
    "GridFunction",
    "FractionalLaplacianOp",
    "eigenmode_apply",
    "multiplier_apply",
    "generator_apply",
    "gaussian_bump",
    "cosine_mode",
    "grid_from_samples",
]


class BandLimitWarning(UserWarning):
    """Input field carries noticeable energy in the top third of the spectrum."""


@dataclass(frozen=True)
class EigenMode:
    """A scalar mode ``amplitude * e_lambda`` with ``L e_lambda = -lambda e_lambda``."""

    lam: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"eigenvalue lambda must be finite and >= 0, got {self.lam}")


def eigenmode_apply(mode: EigenMode, t):
    """``T(t)`` on an eigenmode: ``amplitude * exp(-lambda t)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    out = mode.amplitude * np.exp(-mode.lam * t)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EigenSemigroup:
    """``T(l) = exp(-lambda l)`` acting on scalar amplitudes."""

    lam: float

    def __post_init__(self):
        EigenMode(self.lam)

    def apply(self, f, l):
        return eigenmode_apply(EigenMode(self.lam, float(f)), np.asarray(l, dtype=float))

    def rates(self):
        return np.array([self.lam])


@dataclass(frozen=True)
class GridFunction:
    """Periodic samples on ``[0, domain_length)``."""

    values: np.ndarray
    domain_length: float = 2.0 * math.pi

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        n = v.size
        if v.ndim != 1 or n < 8 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 8, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        if not self.domain_length > 0:
            raise ValueError("domain_length must be positive")
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.size

    @property
    def x(self):
        return np.arange(self.n) * (self.domain_length / self.n)

    def max_norm(self):
        return float(np.max(np.abs(self.values)))


def gaussian_bump(n, domain_length, width=1.0, center=None):
    """Gaussian ``exp(-(x-c)^2 / (2 w^2))`` sampled on the periodic grid."""
    g = GridFunction(np.zeros(n), domain_length)
    c = domain_length / 2 if center is None else center
    return GridFunction(np.exp(-((g.x - c) ** 2) / (2.0 * width**2)), domain_length)


def cosine_mode(n, domain_length, k=1):
    """``cos(xi_k x)`` with ``xi_k = 2 pi k / domain_length``."""
    g = GridFunction(np.zeros(n), domain_length)
    return GridFunction(np.cos(2.0 * math.pi * k * g.x / domain_length), domain_length)


def grid_from_samples(values, domain_length):
    return GridFunction(np.asarray(values, dtype=float), domain_length)


@dataclass(frozen=True)
class FractionalLaplacianOp:
    """Spectral ``L = -(-Delta)^{gamma/2}`` on a periodic grid."""

    gamma: float
    n: int
    domain_length: float = 2.0 * math.pi

    def __post_init__(self):
        if not 0.0 < self.gamma <= 2.0:
            raise ValueError(f"gamma must lie in (0, 2], got {self.gamma}")
        GridFunction(np.zeros(self.n), self.domain_length)

    @property
    def wavenumbers(self):
        return 2.0 * math.pi * np.fft.rfftfreq(self.n, d=self.domain_length / self.n)

    def rates(self):
        """``|xi_k|**gamma`` for the rfft modes."""
        return np.abs(self.wavenumbers) ** self.gamma

    def _check(self, f: GridFunction, warn=True):
        if f.n != self.n or f.domain_length != self.domain_length:
            raise ValueError("grid function does not match the operator's grid")
        fh = np.fft.rfft(f.values)
        if warn:
            energy = np.abs(fh) ** 2
            top = energy[int(2 * energy.size / 3):].sum()
            if top > 1e-12 * max(energy.sum(), 1e-300):
                warnings.warn(
                    f"input has relative energy {top / energy.sum():.2e} in the top third of the spectrum",
                    BandLimitWarning,
                    stacklevel=3,
                )
        return fh

    def apply(self, f: GridFunction, l, warn=True):
        """``T(l_i) f`` for each entry of ``l``; shape ``l.shape + (n,)``."""
        l = np.asarray(l, dtype=float)
        if np.any(l < 0):
            raise ValueError("t must be nonnegative")
        fh = self._check(f, warn)
        mult = np.exp(-l[..., None] * self.rates())
        return np.fft.irfft(mult * fh, n=self.n, axis=-1)

    def apply_modes(self, f: GridFunction, weights):
        """Inverse transform of ``weights * fhat`` (per-mode multipliers)."""
        fh = self._check(f, warn=False)
        return GridFunction(np.fft.irfft(np.asarray(weights) * fh, n=self.n), self.domain_length)


def multiplier_apply(op: FractionalLaplacianOp, f: GridFunction, t) -> GridFunction:
    """``T(t) f``: multiply Fourier mode ``k`` by ``exp(-t |xi_k|**gamma)``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return GridFunction(op.apply(f, float(t)), f.domain_length)


def generator_apply(op: FractionalLaplacianOp, f: GridFunction) -> GridFunction:
    """``L f`` as multiplication by ``-|xi_k|**gamma``."""
    fh = op._check(f)
    return GridFunction(np.fft.irfft(-op.rates() * fh, n=op.n), f.domain_length)
