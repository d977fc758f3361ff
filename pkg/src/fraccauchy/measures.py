"""Order measures, Laplace exponents and Levy tails of stable mixtures.

A :class:`DistributedOrderMeasure` is a finite list of atoms ``(beta_j, nu_j)``
with ``0 < beta_j < 1``. The companion weights ``mu_j = Gamma(1 - beta_j) *
nu_j`` are what enter the Laplace exponent

    psi(s) = sum_j mu_j * s**beta_j,

while the ``nu_j`` describe the Levy tail ``phi(t, inf) = sum_j nu_j *
t**(-beta_j)`` and, after normalization, the mixing law of the waiting-time
exponents in the random walk model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import gamma

from .laplace import complex_power

__all__ = [
    "BETA_EPS",
    "MU_BOUND_CAP",
    "MeasureError",
    "ValidationReport",
    "DistributedOrderMeasure",
    "SubordinatorSpec",
    "psi_eval",
    "levy_tail",
    "validate",
    "discretize",
    "measure_from_literal",
]

BETA_EPS = 1e-6
MU_BOUND_CAP = 1e8


class MeasureError(ValueError):
    """Invalid order measure; ``violations`` lists every problem found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple
    mu_bound_sum: float
    total_mu: float

    def __bool__(self):
        return self.valid


def _check_atoms(atoms, eps=BETA_EPS, cap=MU_BOUND_CAP):
    violations = []
    atoms = list(atoms)
    if not atoms:
        violations.append("measure has no atoms")
    bound = 0.0
    total_mu = 0.0
    seen = set()
    for i, (beta, weight) in enumerate(atoms):
        tag = f"atom {i} (beta={beta!r}, nu_weight={weight!r})"
        beta_ok = isinstance(beta, (int, float, np.floating)) and math.isfinite(beta)
        if not beta_ok or not 0.0 < beta < 1.0:
            violations.append(f"{tag}: beta outside the open interval (0,1)")
        elif not eps <= beta <= 1.0 - eps:
            violations.append(f"{tag}: beta closer than {eps:g} to the boundary of (0,1)")
        if not (math.isfinite(weight) and weight > 0.0):
            violations.append(f"{tag}: nonpositive weight")
        if beta_ok and beta in seen:
            violations.append(f"{tag}: duplicate beta")
        seen.add(beta)
        if beta_ok and 0.0 < beta < 1.0 and math.isfinite(weight) and weight > 0:
            bound += weight / (1.0 - beta)
            total_mu += gamma(1.0 - beta) * weight
    if bound > cap:
        violations.append(
            f"sum nu_weight/(1-beta) = {bound:.6g} exceeds cap {cap:.6g}"
        )
    if atoms and not violations and not (total_mu > 0 and math.isfinite(total_mu)):
        violations.append("total mu mass is not finite and positive")
    return violations, bound, total_mu


@dataclass(frozen=True)
class DistributedOrderMeasure:
    """Finite atomic measure ``nu`` on (0,1) with derived ``mu`` weights.

    Build instances with :meth:`from_atoms` or :meth:`from_mu_weights`; the
    constructor only checks that the stored arrays are already consistent.
    """

    betas: tuple
    nu_weights: tuple
    mu_weights: tuple = field(default=())

    def __post_init__(self):
        violations, _, _ = _check_atoms(zip(self.betas, self.nu_weights))
        if len(self.betas) != len(self.nu_weights):
            violations.append("betas and nu_weights differ in length")
        if list(self.betas) != sorted(self.betas):
            violations.append("atoms are not sorted by beta")
        if violations:
            raise MeasureError(violations)
        mu = tuple(float(gamma(1.0 - b) * w) for b, w in zip(self.betas, self.nu_weights))
        if self.mu_weights:
            # mu weights given exactly (e.g. the constants c_i) are kept as is
            if len(self.mu_weights) != len(mu) or not np.allclose(self.mu_weights, mu, rtol=1e-12, atol=0):
                raise MeasureError(["mu_weights inconsistent with Gamma(1-beta) * nu_weights"])
            mu = tuple(float(m) for m in self.mu_weights)
        object.__setattr__(self, "mu_weights", mu)

    @classmethod
    def from_atoms(cls, atoms: Iterable[Sequence[float]]) -> "DistributedOrderMeasure":
        """Atoms given as ``(beta, nu_weight)`` pairs in any order."""
        atoms = [(float(b), float(w)) for b, w in atoms]
        atoms.sort(key=lambda a: a[0])
        return cls(tuple(a[0] for a in atoms), tuple(a[1] for a in atoms))

    @classmethod
    def from_mu_weights(cls, atoms: Iterable[Sequence[float]]) -> "DistributedOrderMeasure":
        """Atoms given as ``(beta, mu_weight)``, e.g. the constants ``c_i``."""
        atoms = sorted((float(b), float(c)) for b, c in atoms)
        # the cap concerns nu weights and is checked by the constructor
        violations, _, _ = _check_atoms(atoms, cap=math.inf)
        if violations:
            # report in terms of the weights the caller supplied
            raise MeasureError([v.replace("nu_weight=", "mu_weight=") for v in violations])
        return cls(
            tuple(b for b, _ in atoms),
            tuple(c / gamma(1.0 - b) for b, c in atoms),
            tuple(c for _, c in atoms),
        )

    @property
    def n_atoms(self):
        return len(self.betas)

    @property
    def total_nu(self):
        return float(sum(self.nu_weights))

    @property
    def total_mu(self):
        return float(sum(self.mu_weights))

    def atoms(self):
        return list(zip(self.betas, self.nu_weights))

    def mixing_probabilities(self):
        """``nu`` normalized to a probability law on the betas."""
        w = np.asarray(self.nu_weights)
        return w / w.sum()


@dataclass(frozen=True)
class SubordinatorSpec:
    """Pure-jump stable mixture with exponent ``psi(s) = sum mu_j s**beta_j``."""

    measure: DistributedOrderMeasure
    drift: float = 0.0

    def __post_init__(self):
        if self.drift != 0.0:
            raise MeasureError(["only drift b = 0 is supported"])

    @classmethod
    def from_mu_weights(cls, atoms):
        return cls(DistributedOrderMeasure.from_mu_weights(atoms))

    @classmethod
    def from_nu_weights(cls, atoms):
        return cls(DistributedOrderMeasure.from_atoms(atoms))

    @classmethod
    def two_term(cls, c1, b1, c2, b2):
        """``psi(s) = c1 s**b1 + c2 s**b2`` with ``b1 < b2``."""
        if not b1 < b2:
            raise MeasureError([f"need b1 < b2, got b1={b1}, b2={b2}"])
        return cls.from_mu_weights([(b1, c1), (b2, c2)])

    @property
    def betas(self):
        return np.asarray(self.measure.betas)

    @property
    def mu_weights(self):
        return np.asarray(self.measure.mu_weights)

    @property
    def nu_weights(self):
        return np.asarray(self.measure.nu_weights)

    @property
    def beta_max(self):
        return float(self.measure.betas[-1])

    def psi(self, s):
        return psi_eval(self, s)

    def levy_tail(self, t):
        return levy_tail(self, t)


def _as_spec(spec):
    if isinstance(spec, DistributedOrderMeasure):
        return SubordinatorSpec(spec)
    return spec


def psi_eval(spec, s):
    """Laplace exponent ``psi(s)`` on the principal branch.

    Real positive input gives real positive output; complex input must avoid
    ``(-inf, 0]``.
    """
    spec = _as_spec(spec)
    s_arr = np.asarray(s)
    if np.isrealobj(s_arr):
        if np.any(s_arr <= 0):
            raise ValueError("psi is evaluated only for s > 0 off the branch cut")
        out = sum(c * s_arr ** b for b, c in zip(spec.measure.betas, spec.measure.mu_weights))
        return float(out) if s_arr.ndim == 0 else out
    out = 0.0
    for b, c in zip(spec.measure.betas, spec.measure.mu_weights):
        out = out + c * complex_power(s_arr, b)
    return out


def levy_tail(spec, t):
    """Levy tail ``phi(t, inf) = sum nu_j t**(-beta_j)`` for ``t > 0``."""
    spec = _as_spec(spec)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValueError("the Levy tail diverges at t <= 0")
    out = sum(w * t_arr ** (-b) for b, w in zip(spec.measure.betas, spec.measure.nu_weights))
    return float(out) if t_arr.ndim == 0 else out


def validate(measure, eps=BETA_EPS, cap=MU_BOUND_CAP) -> ValidationReport:
    """Check a measure (or raw ``(beta, nu_weight)`` atoms) without raising."""
    if isinstance(measure, SubordinatorSpec):
        measure = measure.measure
    atoms = measure.atoms() if isinstance(measure, DistributedOrderMeasure) else list(measure)
    parsed = []
    violations = []
    for i, atom in enumerate(atoms):
        try:
            b, w = atom
            parsed.append((float(b), float(w)))
        except (TypeError, ValueError):
            violations.append(f"atom {i}: expected a (beta, nu_weight) pair, got {atom!r}")
    more, bound, total_mu = _check_atoms(parsed, eps=eps, cap=cap)
    violations.extend(more)
    return ValidationReport(not violations, tuple(violations), bound, total_mu)


def discretize(density: Callable[[np.ndarray], np.ndarray], n: int, weight="nu") -> DistributedOrderMeasure:
    """Gauss-Legendre atoms for ``nu(d beta) = density(beta) d beta`` on (0,1).

    With ``weight="mu"`` the density describes ``mu`` instead, i.e. the
    quadrature weights become the ``mu`` weights of the atoms. Nodes with zero
    density are dropped.
    """
    if weight not in ("nu", "mu"):
        raise ValueError(f"weight must be 'nu' or 'mu', got {weight!r}")
    if n < 1:
        raise ValueError("need at least one node")
    x, w = np.polynomial.legendre.leggauss(n)
    betas = 0.5 * (x + 1.0)
    vals = np.asarray(density(betas), dtype=float) * np.ones_like(betas)
    if np.any(vals < 0) or not np.all(np.isfinite(vals)):
        raise MeasureError(["density returned negative or non-finite values"])
    weights = 0.5 * w * vals
    keep = weights > 0
    if weight == "mu":
        return DistributedOrderMeasure.from_mu_weights(zip(betas[keep], weights[keep]))
    return DistributedOrderMeasure.from_atoms(zip(betas[keep], weights[keep]))


_FAMILIES = {
    "uniform": lambda b: np.ones_like(b),
    "linear": lambda b: 2.0 * b,
}


def measure_from_literal(obj) -> DistributedOrderMeasure:
    """Build a measure from its config literal.

    Accepted forms: a list of ``{beta, nu_weight}`` (or ``{beta, mu_weight}``)
    records or ``[beta, nu_weight]`` pairs, or ``{kind: uniform, n: 10}``
    (add ``weight: mu`` to discretize ``mu`` rather than ``nu``).
    """
    if isinstance(obj, dict):
        kind = obj.get("kind")
        if kind not in _FAMILIES:
            raise MeasureError([f"unknown measure family {kind!r}"])
        weight = obj.get("weight", "nu")
        if weight not in ("nu", "mu"):
            raise MeasureError([f"measure weight must be 'nu' or 'mu', got {weight!r}"])
        return discretize(_FAMILIES[kind], int(obj.get("n", 10)), weight=weight)
    if isinstance(obj, (str, bytes)) or not hasattr(obj, "__iter__"):
        raise MeasureError([f"measure literal must be a list of atoms or a family, got {obj!r}"])
    atoms, mu_given = [], []
    errors = []
    for i, rec in enumerate(obj):
        if isinstance(rec, dict) and "beta" in rec and ("nu_weight" in rec or "mu_weight" in rec):
            is_mu = "nu_weight" not in rec
            atoms.append((rec["beta"], rec["mu_weight" if is_mu else "nu_weight"]))
            mu_given.append(is_mu)
        elif isinstance(rec, (list, tuple)) and len(rec) == 2:
            atoms.append(tuple(rec))
            mu_given.append(False)
        else:
            errors.append(f"atom {i}: expected {{beta, nu_weight}} or [beta, nu_weight], got {rec!r}")
    if errors:
        raise MeasureError(errors)
    report = validate(atoms)
    if not report:
        raise MeasureError(report.violations)
    if any(mu_given):
        if not all(mu_given):
            raise MeasureError(["atoms mix nu_weight and mu_weight records"])
        return DistributedOrderMeasure.from_mu_weights(atoms)
    return DistributedOrderMeasure.from_atoms(atoms)
