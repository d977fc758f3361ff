"""Scenario configuration: parsing, validation and rendering.

A scenario is a flat YAML (or JSON) mapping. Keys::

    command   solve | verify | density | ctrw | ml | validate  (default solve)
    atoms     list of {beta, nu_weight} / {beta, mu_weight} records or [beta, w] pairs
    measure   {kind: uniform | linear, n: N, weight: nu | mu}  (instead of atoms)
    lambda    eigenvalue of -L (eigenmode problem)
    field     {gamma, n, length, initial: {kind: gaussian, width} | {kind: cosine, k}
               | {kind: csv, path}}  (field problem)
    t         list of times (or one number)
    t_grid    {min, max, num}  log-spaced alternative to t
    method    talbot | quad | mc | auto (solve); talbot | mc (density)
    nodes, paths, dt, t_min, t_max, levels, c, alpha, z, l_max, l_num, seed

``seed`` defaults to 0 so every scenario is reproducible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from dataclasses import field as dc_field
from typing import Any, Optional

import yaml

from .measures import MeasureError, measure_from_literal

__all__ = ["ConfigError", "ScenarioConfig", "parse_config", "render_config", "COMMANDS"]

COMMANDS = ("solve", "verify", "density", "ctrw", "ml", "validate")

_DEFAULTS = {
    "method": "auto",
    "nodes": 32,
    "paths": 100_000,
    "dt": 1e-3,
    "t_min": 0.1,
    "t_max": 5.0,
    "levels": 3,
}

_NUMERIC_KEYS = ("method", "nodes", "paths", "dt", "t_min", "t_max", "levels", "c", "alpha", "z", "l_max", "l_num")
_KNOWN = {"command", "atoms", "measure", "lambda", "field", "t", "t_grid", "seed"} | set(_NUMERIC_KEYS)
_FIELD_KEYS = {"gamma", "n", "length", "initial"}

_NEEDS_MEASURE = {"solve", "verify", "density", "ctrw", "validate"}


class ConfigError(ValueError):
    """All problems found in a scenario, not only the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass
class ScenarioConfig:
    command: str = "solve"
    measure: Any = None
    problem: Optional[str] = None
    lam: Optional[float] = None
    field: Optional[dict] = None
    t: Optional[list] = None
    numeric: dict = dc_field(default_factory=dict)
    seed: int = 0

    def build_measure(self):
        return measure_from_literal(self.measure)

    def get(self, key, default=None):
        return self.numeric.get(key, _DEFAULTS.get(key, default))

    def to_dict(self):
        out = {"command": self.command, "seed": self.seed}
        if self.measure is not None:
            out["measure" if isinstance(self.measure, dict) else "atoms"] = self.measure
        if self.lam is not None:
            out["lambda"] = self.lam
        if self.field is not None:
            out["field"] = self.field
        if self.t is not None:
            out["t"] = self.t
        out.update(self.numeric)
        return out


def _number(errors, key, value, positive=False, integer=False, nonneg=False):
    ok = isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)
    if ok and integer and int(value) != value:
        ok = False
    if ok and positive and not value > 0:
        ok = False
    if ok and nonneg and not value >= 0:
        ok = False
    if not ok:
        kind = "a positive integer" if integer else "a positive number" if positive else "a nonnegative number" if nonneg else "a number"
        errors.append(f"{key}: expected {kind}, got {value!r}")
        return None
    return int(value) if integer else float(value)


def _atoms_literal(errors, raw):
    """Normalize atom records; YAML's ``{0.5, 1}`` reads as a two-key set."""
    if not isinstance(raw, list) or not raw:
        errors.append(f"atoms: expected a nonempty list, got {raw!r}")
        return None
    out = []
    for i, rec in enumerate(raw):
        if isinstance(rec, dict) and len(rec) == 2 and all(v is None for v in rec.values()):
            rec = list(rec.keys())
        if isinstance(rec, (list, tuple)) and len(rec) == 2:
            out.append({"beta": rec[0], "nu_weight": rec[1]})
        elif isinstance(rec, dict):
            extra = set(rec) - {"beta", "nu_weight", "mu_weight"}
            if extra or "beta" not in rec or ("nu_weight" in rec) == ("mu_weight" in rec):
                errors.append(f"atoms[{i}]: expected {{beta, nu_weight}} or {{beta, mu_weight}}, got {rec!r}")
                continue
            out.append(dict(rec))
        else:
            errors.append(f"atoms[{i}]: expected a record or a [beta, weight] pair, got {rec!r}")
    return out


def _check_field(errors, raw):
    if not isinstance(raw, dict):
        errors.append(f"field: expected a mapping, got {raw!r}")
        return None
    out = dict(raw)
    for key in sorted(set(raw) - _FIELD_KEYS):
        errors.append(f"field.{key}: unknown key")
    gamma = raw.get("gamma")
    if gamma is None:
        errors.append("field.gamma: required")
    elif _number(errors, "field.gamma", gamma, positive=True) is not None and not gamma <= 2:
        errors.append(f"field.gamma: must lie in (0, 2], got {gamma!r}")
    n = out.setdefault("n", 256)
    if _number(errors, "field.n", n, positive=True, integer=True) is not None and (n < 8 or n & (n - 1)):
        errors.append(f"field.n: must be a power of two >= 8, got {n!r}")
    _number(errors, "field.length", out.setdefault("length", 2 * math.pi), positive=True)
    init = out.setdefault("initial", {"kind": "gaussian", "width": 1.0})
    if not isinstance(init, dict) or init.get("kind") not in ("gaussian", "cosine", "csv"):
        errors.append(f"field.initial: expected kind gaussian, cosine or csv, got {init!r}")
    elif init["kind"] == "gaussian":
        _number(errors, "field.initial.width", init.setdefault("width", 1.0), positive=True)
    elif init["kind"] == "cosine":
        _number(errors, "field.initial.k", init.setdefault("k", 1), integer=True, nonneg=True)
    elif not isinstance(init.get("path"), str):
        errors.append("field.initial.path: csv initial data needs a path")
    return out


def _times(errors, raw, grid):
    if raw is not None and grid is not None:
        errors.append("t and t_grid are mutually exclusive")
        return None
    if grid is not None:
        if not isinstance(grid, dict) or set(grid) - {"min", "max", "num"}:
            errors.append(f"t_grid: expected {{min, max, num}}, got {grid!r}")
            return None
        lo = _number(errors, "t_grid.min", grid.get("min"), positive=True)
        hi = _number(errors, "t_grid.max", grid.get("max"), positive=True)
        num = _number(errors, "t_grid.num", grid.get("num"), positive=True, integer=True)
        if None in (lo, hi, num):
            return None
        if num == 1:
            return [lo]
        if not hi > lo:
            errors.append("t_grid: max must exceed min")
            return None
        step = math.log(hi / lo) / (num - 1)
        return [lo * math.exp(step * i) for i in range(num - 1)] + [hi]
    if raw is None:
        return None
    vals = raw if isinstance(raw, list) else [raw]
    out = []
    for i, v in enumerate(vals):
        x = _number(errors, f"t[{i}]", v, positive=True)
        if x is not None:
            out.append(x)
    if len(out) == len(vals) and any(b <= a for a, b in zip(out, out[1:])):
        errors.append("t: times must be strictly increasing")
    return out


def _from_mapping(doc) -> ScenarioConfig:
    errors = []
    if not isinstance(doc, dict):
        raise ConfigError([f"config must be a mapping, got {type(doc).__name__}"])
    for key in sorted(set(doc) - _KNOWN, key=str):
        errors.append(f"{key}: unknown key")
    cfg = ScenarioConfig()
    cfg.command = doc.get("command", "solve")
    if cfg.command not in COMMANDS:
        errors.append(f"command: expected one of {', '.join(COMMANDS)}, got {cfg.command!r}")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        errors.append(f"seed: expected a nonnegative integer, got {seed!r}")
    else:
        cfg.seed = seed

    # measure
    if "atoms" in doc and "measure" in doc:
        errors.append("atoms and measure are mutually exclusive")
    elif "atoms" in doc:
        cfg.measure = _atoms_literal(errors, doc["atoms"])
    elif "measure" in doc:
        cfg.measure = doc["measure"]
        if not isinstance(cfg.measure, dict):
            errors.append(f"measure: expected {{kind, n}}, got {cfg.measure!r}")
            cfg.measure = None
    elif cfg.command in _NEEDS_MEASURE:
        errors.append(f"{cfg.command}: an order measure (atoms or measure) is required")
    if cfg.measure is not None:
        try:
            measure_from_literal(cfg.measure)
        except MeasureError as exc:
            errors.extend(f"atoms: {v}" for v in exc.violations)
        except (TypeError, ValueError) as exc:
            errors.append(f"atoms: {exc}")

    # problem block
    has_eigen, has_field = "lambda" in doc, "field" in doc
    if has_eigen and has_field:
        errors.append("exactly one problem block (lambda or field) is allowed, got both")
    elif has_eigen:
        cfg.problem = "eigen"
        cfg.lam = _number(errors, "lambda", doc["lambda"], nonneg=True)
    elif has_field:
        cfg.problem = "field"
        cfg.field = _check_field(errors, doc["field"])
    if cfg.command == "solve" and not (has_eigen or has_field):
        errors.append("solve: exactly one problem block (lambda or field) is required")
    if cfg.command == "verify" and not has_eigen:
        errors.append("verify: the residual check needs an eigenmode problem (lambda)")

    cfg.t = _times(errors, doc.get("t"), doc.get("t_grid"))
    if cfg.command in ("solve", "density", "ctrw") and cfg.t is None:
        errors.append(f"{cfg.command}: t is required")
    if cfg.command in ("density", "ctrw") and cfg.t is not None and len(cfg.t) != 1:
        errors.append(f"{cfg.command}: exactly one time t is supported")

    num = {}
    for key in _NUMERIC_KEYS:
        if key in doc:
            num[key] = doc[key]
    checks = {
        "nodes": dict(positive=True, integer=True),
        "paths": dict(positive=True, integer=True),
        "levels": dict(positive=True, integer=True),
        "l_num": dict(positive=True, integer=True),
        "dt": dict(positive=True),
        "t_min": dict(positive=True),
        "t_max": dict(positive=True),
        "c": dict(positive=True),
        "alpha": dict(positive=True),
        "l_max": dict(positive=True),
    }
    for key, opts in checks.items():
        if key in num:
            v = _number(errors, key, num[key], **opts)
            if v is not None:
                num[key] = v
    if "z" in num:
        zs = num["z"] if isinstance(num["z"], list) else [num["z"]]
        parsed = [_number(errors, "z", z) for z in zs]
        if all(p is not None for p in parsed):
            if any(p > 0 for p in parsed):
                errors.append("z: only z <= 0 is supported")
            num["z"] = parsed if isinstance(num["z"], list) else parsed[0]
    if "method" in num:
        allowed = {"solve": ("auto", "talbot", "quad", "mc"), "density": ("talbot", "mc")}.get(cfg.command)
        if allowed and num["method"] not in allowed:
            errors.append(f"method: expected one of {', '.join(allowed)} for {cfg.command}, got {num['method']!r}")
        if cfg.command == "solve" and num["method"] == "talbot" and has_field:
            errors.append("method: talbot applies to eigenmode problems only")
    if cfg.command == "ctrw":
        if "c" not in num:
            errors.append("ctrw: scale c is required")
        elif isinstance(num["c"], float) and num["c"] < 1:
            errors.append(f"c: scale must be >= 1, got {num['c']!r}")
    if cfg.command == "ml":
        if "alpha" not in num:
            errors.append("ml: alpha is required")
        elif isinstance(num["alpha"], float) and num["alpha"] > 1:
            errors.append(f"alpha: must lie in (0, 1], got {num['alpha']!r}")
        if "z" not in num:
            errors.append("ml: z is required")
    if cfg.command == "verify":
        if isinstance(num.get("dt"), float) and num["dt"] > 1e-3:
            errors.append(f"dt: residual checks need dt <= 1e-3, got {num['dt']!r}")
        if isinstance(num.get("t_min"), float) and num["t_min"] < 0.1:
            errors.append(f"t_min: residual window must start at t >= 0.1, got {num['t_min']!r}")
    cfg.numeric = num
    if errors:
        raise ConfigError(errors)
    return cfg


def parse_config(text) -> ScenarioConfig:
    """Parse and validate a scenario; :class:`ConfigError` lists every problem."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"malformed config: {exc}"]) from exc
    return _from_mapping(doc if doc is not None else {})


def config_from_mapping(doc) -> ScenarioConfig:
    return _from_mapping(doc)


def render_config(cfg: ScenarioConfig) -> str:
    """Canonical YAML text; ``parse_config(render_config(c)) == c``."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True, default_flow_style=None)


def config_json(cfg: ScenarioConfig) -> str:
    return json.dumps(cfg.to_dict(), sort_keys=True)
