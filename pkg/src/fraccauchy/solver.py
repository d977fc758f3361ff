"""Three routes to the subordinated solution ``S(t) f = int T(l) f f_{E(t)}(l) dl``.

* :func:`subordinate_apply` integrates ``T(l) f`` against the inverse
  subordinator density with composite Gauss-Legendre quadrature;
* :func:`subordinate_apply_mc` averages ``T(E_i) f`` over exact draws of
  ``E_psi(t)``;
* :func:`mode_solution` inverts the mode transform ``psi/(s(psi + lambda))``
  directly and only applies to eigenmodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .laplace import complex_power, invert
from .measures import psi_eval
from .rng import map_blocks, merge_moments
from .semigroup import EigenSemigroup, GridFunction
from .subordinate import _density_values, inverse_density, sample_inverse

__all__ = [
    "QuadratureError",
    "SolutionTrace",
    "subordinate_apply",
    "subordinate_apply_mc",
    "mode_solution",
    "mode_transform",
    "two_term_mode_transform",
    "solve",
]

QUAD_RTOL = 1e-5


class QuadratureError(RuntimeError):
    """Refined and unrefined quadratures disagree."""

    def __init__(self, coarse, fine, rel):
        self.coarse, self.fine, self.rel = coarse, fine, rel
        super().__init__(
            f"quadrature refinement disagreement {rel:.3e} exceeds {QUAD_RTOL:g}: "
            f"coarse={coarse!r}, fine={fine!r}"
        )


@dataclass
class SolutionTrace:
    """Solution values along a time grid for one method."""

    t_grid: np.ndarray
    values: list
    method: str
    stderr: Optional[list] = None

    def as_array(self):
        return np.array([v.values if isinstance(v, GridFunction) else v for v in self.values])


def _wrap(value, f):
    if isinstance(f, GridFunction):
        return GridFunction(np.asarray(value), f.domain_length)
    return float(value)


def _panel_rule(edges, q):
    x, w = np.polynomial.legendre.leggauss(q)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * x
    weights = 0.5 * (b - a) * w
    return nodes.ravel(), weights.ravel()


def _edges(upper, panels, fastest):
    uniform = np.linspace(0.0, upper, panels + 1)
    first = uniform[1]
    # geometric grading toward l = 0 so exp(-rate * l) is resolved for the fastest rate
    levels = max(0, int(math.ceil(math.log2(max(first * fastest, 1.0)))) + 2)
    graded = first * 2.0 ** -np.arange(levels, 0, -1)
    return np.concatenate([[0.0], graded, uniform[1:]])


def _quadrature(spec, semigroup, f, t, edges, q, nodes):
    l, w = _panel_rule(edges, q)
    dens = _density_values(spec, t, l, nodes)
    vals = semigroup.apply(f, l)
    return np.tensordot(w * dens, vals, axes=(0, 0))


def subordinate_apply(spec, semigroup, f, t, quad=16, panels=16, nodes=32):
    """``S(t) f`` by Gauss-Legendre quadrature of the subordination integral.

    ``quad`` Gauss points per panel on the density's support, which is
    truncated where the density falls below 1e-12 of its peak. The result is
    accepted when doubling the number of panels changes it by less than
    ``QUAD_RTOL`` relative to its max-norm; otherwise :class:`QuadratureError`
    carries both values.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    upper = inverse_density(spec, t, nodes=nodes).l_grid[-1]
    fastest = float(np.max(semigroup.rates()))
    edges = _edges(upper, panels, fastest)
    coarse = _quadrature(spec, semigroup, f, t, edges, quad, nodes)
    fine_edges = np.sort(np.concatenate([edges, 0.5 * (edges[:-1] + edges[1:])]))
    fine = _quadrature(spec, semigroup, f, t, fine_edges, quad, nodes)
    scale = max(float(np.max(np.abs(fine))), 1e-300)
    rel = float(np.max(np.abs(fine - coarse))) / scale
    if rel > QUAD_RTOL:
        raise QuadratureError(coarse, fine, rel)
    return _wrap(fine, f)


def subordinate_apply_mc(spec, semigroup, f, t, n_paths, seed=0, threads=1):
    """``E[T(E_psi(t)) f]`` over exact inverse-subordinator draws.

    Returns ``(value, stderr)``; the standard error is per output component.
    Block statistics are merged in block order, so the result does not
    depend on ``threads``.
    """
    if n_paths < 1000:
        raise ValueError("need at least 1000 paths")
    if t <= 0:
        raise ValueError("t must be positive")

    def block(gen, size):
        e = sample_inverse(spec, t, gen, size)
        vals = semigroup.apply(f, e)
        mean = vals.mean(axis=0)
        return size, mean, ((vals - mean) ** 2).sum(axis=0)

    n_tot, mean, m2 = merge_moments(map_blocks(block, n_paths, seed, "subordinate-apply", threads))
    stderr = np.sqrt(m2 / (n_tot - 1) / n_tot)
    return _wrap(mean, f), _wrap(stderr, f)


def mode_transform(spec, lam, s):
    """``r(s) = psi(s) / (s (psi(s) + lambda))``."""
    ps = psi_eval(spec, s)
    return ps / (s * (ps + lam))


def mode_solution(spec, lam, t, nodes=32):
    """``h(t; lambda)`` by Talbot inversion of :func:`mode_transform`.

    ``t`` may be an array. ``lambda = 0`` returns exactly one.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValueError("t must be positive")
    if lam == 0:
        out = np.ones_like(t_arr)
    else:
        out = np.asarray(invert(lambda s: mode_transform(spec, lam, s), t_arr, nodes))
    return float(out) if out.ndim == 0 else out


def two_term_mode_transform(c1, b1, c2, b2, lam, s):
    """``(c1 s^{b1-1} + c2 s^{b2-1}) / (c1 s^{b1} + c2 s^{b2} + lambda)``."""
    if not 0.0 < b1 < b2 < 1.0:
        raise ValueError(f"need 0 < b1 < b2 < 1, got b1={b1}, b2={b2}")
    p1 = complex_power(s, b1)
    p2 = complex_power(s, b2)
    s = np.asarray(s, dtype=complex)
    out = (c1 * p1 + c2 * p2) / (s * (c1 * p1 + c2 * p2 + lam))
    return out[()] if np.ndim(out) == 0 else out


def solve(spec, semigroup, f, t_grid, method="auto", n_paths=100_000, seed=0, threads=1, nodes=32):
    """Solution trace on ``t_grid``.

    ``auto`` picks the mode transform for eigenmodes and quadrature for grid
    data; ``mc`` is meant for verification.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or np.any(t_grid <= 0) or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be ascending and positive")
    if method == "auto":
        method = "talbot" if isinstance(semigroup, EigenSemigroup) else "quad"
    if method == "talbot":
        if not isinstance(semigroup, EigenSemigroup):
            raise ValueError("the talbot route only applies to eigenmode problems")
        vals = mode_solution(spec, semigroup.lam, t_grid, nodes) * float(f)
        return SolutionTrace(t_grid, [float(v) for v in np.atleast_1d(vals)], "talbot-mode")
    if method == "quad":
        vals = [subordinate_apply(spec, semigroup, f, t, nodes=nodes) for t in t_grid]
        return SolutionTrace(t_grid, vals, "quadrature")
    if method == "mc":
        pairs = [
            subordinate_apply_mc(spec, semigroup, f, t, n_paths, seed=_sub_seed(seed, i), threads=threads)
            for i, t in enumerate(t_grid)
        ]
        return SolutionTrace(t_grid, [p[0] for p in pairs], "mc", [p[1] for p in pairs])
    raise ValueError(f"unknown method {method!r}")


def _sub_seed(seed, index):
    # independent streams per t point, still a pure function of the seed
    return int(np.random.SeedSequence([int(seed), index]).generate_state(1)[0])
