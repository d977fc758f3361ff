"""Command-line entry point: ``fraccauchy <subcommand> [--config FILE] ...``.

Every run writes ``result.csv`` and ``manifest.json`` (config echo, seed,
library versions) to ``--out``; the wall time goes to ``timing.json`` so the
first two stay byte-identical across reruns. Exit codes: 0 success, 1
validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import platform
import sys
import time
from importlib import metadata
from pathlib import Path

import mpmath
import numpy as np
import scipy
import yaml

from .config import ConfigError, ScenarioConfig, config_from_mapping
from .laplace import BranchCutError, InversionError
from .measures import MeasureError, SubordinatorSpec, validate
from .semigroup import EigenSemigroup, FractionalLaplacianOp, cosine_mode, gaussian_bump, grid_from_samples
from .solver import QuadratureError, solve

__all__ = ["main", "run_scenario", "build_parser", "EXIT_OK", "EXIT_INVALID", "EXIT_NUMERICAL"]

log = logging.getLogger("fraccauchy")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


def _fmt(x):
    """Full-precision decimal text for a float (shortest round-trip repr)."""
    if x is None:
        return ""
    return repr(float(x))


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _versions():
    try:
        pkg = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        pkg = "unknown"
    return {
        "fraccauchy": pkg,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "mpmath": mpmath.__version__,
        "python": platform.python_version(),
    }


def _spec(cfg):
    return SubordinatorSpec(cfg.build_measure())


def _field_data(cfg):
    fd = cfg.field
    n, length = int(fd["n"]), float(fd["length"])
    init = fd["initial"]
    if init["kind"] == "gaussian":
        f = gaussian_bump(n, length, float(init["width"]))
    elif init["kind"] == "cosine":
        f = cosine_mode(n, length, int(init["k"]))
    else:
        f = grid_from_samples(np.loadtxt(init["path"], delimiter=",", ndmin=1), length)
    return FractionalLaplacianOp(float(fd["gamma"]), n, length), f


def _run_solve(cfg, threads):
    spec = _spec(cfg)
    method = cfg.get("method")
    if cfg.problem == "eigen":
        sg, f = EigenSemigroup(cfg.lam), 1.0
    else:
        sg, f = _field_data(cfg)
    trace = solve(spec, sg, f, cfg.t, method=method, n_paths=cfg.get("paths"), seed=cfg.seed,
                  threads=threads, nodes=cfg.get("nodes"))
    if cfg.problem == "eigen":
        if trace.stderr is None:
            rows = [(t, v) for t, v in zip(trace.t_grid, trace.values)]
            return _csv_text(["t", "value"], rows), None
        rows = [(t, v, s) for t, v, s in zip(trace.t_grid, trace.values, trace.stderr)]
        return _csv_text(["t", "value", "stderr"], rows), None
    x = f.x
    rows = []
    for i, t in enumerate(trace.t_grid):
        vals = trace.values[i].values
        errs = trace.stderr[i].values if trace.stderr else [None] * len(vals)
        rows.extend((t, xi, v, s) for xi, v, s in zip(x, vals, errs))
    return _csv_text(["t", "x", "value", "stderr"], rows), None


def _run_verify(cfg, threads):
    from .fraccalc import residual_study

    spec = _spec(cfg)
    rep = residual_study(spec, cfg.lam, dt=cfg.get("dt"), levels=cfg.get("levels"),
                         t_min=cfg.get("t_min"), t_max=cfg.get("t_max"))
    rows = [(dt, r) for dt, r in rep.levels]
    return _csv_text(["dt", "max_residual"], rows), rep.as_dict()


def _run_density(cfg, threads):
    from .subordinate import inverse_density, inverse_density_mc

    spec = _spec(cfg)
    t = cfg.t[0]
    grid = None
    if "l_max" in cfg.numeric:
        grid = np.linspace(0.0, cfg.numeric["l_max"], int(cfg.numeric.get("l_num", 201)))
    method = cfg.get("method")
    if method in ("auto", "talbot"):
        tab = inverse_density(spec, t, grid, nodes=cfg.get("nodes"))
        rows = [(l, v, None) for l, v in zip(tab.l_grid, tab.values)]
    else:
        if grid is None:
            full = inverse_density(spec, t, nodes=cfg.get("nodes")).l_grid
            grid = np.linspace(0.0, full[-1], int(cfg.numeric.get("l_num", 201)))
        tab = inverse_density_mc(spec, t, grid, cfg.get("paths"), seed=cfg.seed, threads=threads)
        rows = list(zip(tab.l_grid, tab.values, tab.stderr))
    return _csv_text(["l", "f", "stderr"], rows), {"method": tab.method, "t": t, "mass": tab.mass}


def _run_ctrw(cfg, threads):
    from .ctrw import count_jumps, ks_critical, ks_distance
    from .rng import stream
    from .subordinate import sample_inverse

    spec = _spec(cfg)
    c, t, n = cfg.numeric["c"], cfg.t[0], cfg.get("paths")
    counts = count_jumps(spec.measure, c, t, n, seed=cfg.seed, threads=threads)
    ref = sample_inverse(spec, t, stream(cfg.seed, "ctrw-reference"), n)
    scaled = counts / c
    summary = {
        "c": c,
        "t": t,
        "paths": n,
        "mean_scaled_count": float(scaled.mean()),
        "stderr_scaled_count": float(scaled.std(ddof=1) / np.sqrt(n)),
        "ks_vs_inverse_subordinator": ks_distance(scaled, ref),
        "ks_critical_0.01": ks_critical(n, n),
    }
    rows = [(i, int(k)) for i, k in enumerate(counts)]
    return _csv_text(["path", "count"], rows), summary


def _run_ml(cfg, threads):
    from .special import mittag_leffler

    alpha = cfg.numeric["alpha"]
    zs = cfg.numeric["z"] if isinstance(cfg.numeric["z"], list) else [cfg.numeric["z"]]
    vals = [mittag_leffler(alpha, z) for z in zs]
    for v in vals:
        print(_fmt(v))
    return _csv_text(["z", "value"], list(zip(zs, vals))), None


def _run_validate(cfg, threads):
    rep = validate(cfg.build_measure())
    report = {
        "valid": rep.valid,
        "violations": list(rep.violations),
        "mu_bound_sum": rep.mu_bound_sum,
        "total_mu": rep.total_mu,
    }
    return _csv_text(["valid", "mu_bound_sum", "total_mu"], [(rep.valid, rep.mu_bound_sum, rep.total_mu)]), report


_RUNNERS = {
    "solve": _run_solve,
    "verify": _run_verify,
    "density": _run_density,
    "ctrw": _run_ctrw,
    "ml": _run_ml,
    "validate": _run_validate,
}


def _write(path: Path, text):
    path.write_text(text, encoding="utf-8")


def run_scenario(cfg: ScenarioConfig, out_dir, threads=1):
    """Run one scenario and write its artifacts; returns the exit status."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    try:
        csv_text, report = _RUNNERS[cfg.command](cfg, threads)
    except (ConfigError, MeasureError, BranchCutError) as exc:
        log.error("validation error: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InversionError, QuadratureError, RuntimeError, FloatingPointError, ArithmeticError) as exc:
        log.error("numerical failure: %s", exc)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    manifest = {
        "command": cfg.command,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "versions": _versions(),
        "artifacts": ["result.csv"] + (["report.json"] if report is not None else []),
    }
    _write(out / "result.csv", csv_text)
    if report is not None:
        _write(out / "report.json", json.dumps(report, sort_keys=True, indent=2) + "\n")
    _write(out / "manifest.json", json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    _write(out / "timing.json", json.dumps({"wall_time_s": time.perf_counter() - start}) + "\n")
    status = EXIT_OK
    if cfg.command == "validate" and not report["valid"]:
        print("\n".join(report["violations"]), file=sys.stderr)
        status = EXIT_INVALID
    return status


def _load_measure_file(path):
    doc = yaml.safe_load(Path(path).read_text())
    if isinstance(doc, dict) and ("atoms" in doc or "measure" in doc):
        return {k: doc[k] for k in ("atoms", "measure") if k in doc}
    if isinstance(doc, dict):
        return {"measure": doc}
    return {"atoms": doc}


def _floats(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML scenario file; its keys override inline flags")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--out", default="out", help="output directory (default ./out)")
    common.add_argument("--threads", type=int, default=1, help="worker threads; affects speed only")
    common.add_argument("--spec", "--nu", dest="spec", help="YAML file with the order measure")
    common.add_argument("--atoms", help="inline atoms, e.g. '[[0.5, 1.0]]'")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fraccauchy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="subordinated solution on a time grid")
    p.add_argument("--problem", choices=("eigen", "field"))
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--length", type=float)
    p.add_argument("--width", type=float, help="Gaussian initial bump width")
    p.add_argument("--t", "--t-grid", dest="t", help="comma-separated times")
    p.add_argument("--method", choices=("auto", "talbot", "quad", "mc"))
    p.add_argument("--nodes", type=int)
    p.add_argument("--paths", type=int)

    p = sub.add_parser("verify", parents=[common], help="governing-equation residual study")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-min", dest="t_min", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--levels", type=int)

    p = sub.add_parser("density", parents=[common], help="inverse-subordinator density table")
    p.add_argument("--t", dest="t", help="time")
    p.add_argument("--method", choices=("talbot", "mc"))
    p.add_argument("--paths", type=int)
    p.add_argument("--l-max", dest="l_max", type=float)
    p.add_argument("--l-num", dest="l_num", type=int)

    p = sub.add_parser("ctrw", parents=[common], help="mixture random walk jump counts")
    p.add_argument("--c", type=float)
    p.add_argument("--t", dest="t")
    p.add_argument("--paths", type=int)

    p = sub.add_parser("ml", parents=[common], help="Mittag-Leffler function value")
    p.add_argument("--alpha", type=float)
    p.add_argument("--z", help="comma-separated arguments z <= 0")

    sub.add_parser("validate", parents=[common], help="check an order measure")
    return parser


def _inline_mapping(args):
    doc = {"command": args.command}
    if args.spec:
        doc.update(_load_measure_file(args.spec))
    if args.atoms:
        doc["atoms"] = yaml.safe_load(args.atoms)
    get = lambda name: getattr(args, name, None)  # noqa: E731
    if get("lam") is not None:
        doc["lambda"] = args.lam
    if get("gamma") is not None or get("problem") == "field":
        fd = {"gamma": get("gamma")}
        for key in ("n", "length"):
            if get(key) is not None:
                fd[key] = get(key)
        if get("width") is not None:
            fd["initial"] = {"kind": "gaussian", "width": args.width}
        doc["field"] = fd
    if get("t") is not None:
        doc["t"] = _floats(args.t)
    for key in ("method", "nodes", "paths", "dt", "t_min", "t_max", "levels", "c", "alpha", "l_max", "l_num"):
        if get(key) is not None:
            doc[key] = get(key)
    if get("z") is not None:
        zs = _floats(args.z)
        doc["z"] = zs[0] if len(zs) == 1 else zs
    if args.seed is not None:
        doc["seed"] = args.seed
    return doc


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    doc = _inline_mapping(args)
    if args.config:
        try:
            file_doc = yaml.safe_load(Path(args.config).read_text())
        except (OSError, yaml.YAMLError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_INVALID
        if not isinstance(file_doc, dict):
            print("error: config must be a mapping", file=sys.stderr)
            return EXIT_INVALID
        if "atoms" in file_doc or "measure" in file_doc:
            doc.pop("atoms", None)
            doc.pop("measure", None)
        doc.update(file_doc)
        doc["command"] = file_doc.get("command", args.command)
        if args.seed is not None and "seed" not in file_doc:
            doc["seed"] = args.seed
    try:
        cfg = config_from_mapping(doc)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_INVALID
    return run_scenario(cfg, args.out, threads=max(1, args.threads))


if __name__ == "__main__":
    sys.exit(main())
