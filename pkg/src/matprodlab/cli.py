"""Command-line front end: evaluate bounds, run experiments, emit artifacts.

Subcommands: bounds, simulate, rate, scalar-floor, baranyai.

Configuration for experiments is a flat key = value text file (# comments),
overridden by command-line flags; the MATPROD_SEED environment variable
overrides the file's seed but is itself overridden by --seed.
Exit codes: 0 success, 2 usage or configuration error, 3 restriction failure
under --strict, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, baranyai, bounds, montecarlo
from ._serialize import dumps, format_float
from .ensembles import (
    EnsembleSpec,
    ensemble_bound,
    rank_one_sphere,
    scalar_uniform,
    sign_perturbation,
    two_point,
)

CSV_BASE_COLUMNS = ["n", "trial", "err_total", "err_mean_part", "err_exp_part"]

SIMULATE_DEFAULTS = {
    "trials": 100,
    "delta": 0.1,
    "seed": 0,
    "depth": None,
    "threads": 1,
}


class ConfigError(ValueError):
    pass


def _parse_matrix(text: str) -> list:
    """Rows separated by ';', entries by ',': "1,0;0,1" is the 2x2 identity."""
    try:
        rows = [
            [float(cell) for cell in row.split(",")]
            for row in text.strip().split(";")
        ]
    except ValueError as exc:
        raise ConfigError(f"bad matrix literal {text!r}: {exc}") from exc
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ConfigError(f"ragged matrix literal {text!r}")
    return rows


def _parse_int_list(text: str) -> list:
    try:
        return [int(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}") from exc


def read_config_file(path: str) -> dict:
    """Flat key = value pairs; blank lines and # comments ignored."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def resolve_simulate_config(args) -> dict:
    """Merge defaults < config file < MATPROD_SEED < flags into one dict."""
    file_cfg = read_config_file(args.config) if args.config else {}
    resolved = dict(SIMULATE_DEFAULTS)

    kind = file_cfg.get("ensemble")
    if kind is None:
        raise ConfigError("config must set 'ensemble'")
    resolved["ensemble"] = kind

    for key in ("trials", "seed", "threads", "depth", "d"):
        if key in file_cfg:
            resolved[key] = int(file_cfg[key])
    if "delta" in file_cfg:
        resolved["delta"] = float(file_cfg["delta"])
    if "n_grid" in file_cfg:
        resolved["n_grid"] = _parse_int_list(file_cfg["n_grid"])

    if kind == "rank_one_sphere":
        if "r" not in file_cfg or "d" not in file_cfg:
            raise ConfigError("rank_one_sphere needs keys 'd' and 'r'")
        resolved["r"] = float(file_cfg["r"])
    elif kind == "scalar_uniform":
        if "a" not in file_cfg or "b" not in file_cfg:
            raise ConfigError("scalar_uniform needs keys 'a' and 'b'")
        resolved["a"] = float(file_cfg["a"])
        resolved["b"] = float(file_cfg["b"])
        resolved["d"] = 1
    elif kind == "two_point":
        if "A" not in file_cfg or "B" not in file_cfg:
            raise ConfigError("two_point needs matrix keys 'A' and 'B'")
        resolved["A"] = _parse_matrix(file_cfg["A"])
        resolved["B"] = _parse_matrix(file_cfg["B"])
        resolved["d"] = len(resolved["A"])
    elif kind == "sign_perturbation":
        if "X0" not in file_cfg or "B" not in file_cfg:
            raise ConfigError("sign_perturbation needs matrix keys 'X0' and 'B'")
        resolved["X0"] = _parse_matrix(file_cfg["X0"])
        resolved["B"] = _parse_matrix(file_cfg["B"])
        resolved["d"] = len(resolved["X0"])
    else:
        raise ConfigError(f"unknown ensemble kind {kind!r}")

    env_seed = os.environ.get("MATPROD_SEED")
    if env_seed is not None:
        try:
            resolved["seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"bad MATPROD_SEED {env_seed!r}") from exc

    if getattr(args, "n", None):
        resolved["n_grid"] = _parse_int_list(args.n)
    if getattr(args, "trials", None) is not None:
        resolved["trials"] = args.trials
    if getattr(args, "delta", None) is not None:
        resolved["delta"] = args.delta
    if getattr(args, "seed", None) is not None:
        resolved["seed"] = args.seed
    if getattr(args, "threads", None) is not None:
        resolved["threads"] = args.threads

    if "n_grid" not in resolved:
        raise ConfigError("no grid: set 'n_grid' in the config or pass --n")
    return resolved


def build_ensemble(resolved: dict) -> EnsembleSpec:
    kind = resolved["ensemble"]
    seed = resolved["seed"]
    if kind == "rank_one_sphere":
        return rank_one_sphere(resolved["d"], resolved["r"], seed)
    if kind == "scalar_uniform":
        return scalar_uniform(resolved["a"], resolved["b"], seed)
    if kind == "two_point":
        return two_point(np.array(resolved["A"]), np.array(resolved["B"]), seed)
    if kind == "sign_perturbation":
        return sign_perturbation(np.array(resolved["X0"]), np.array(resolved["B"]), seed)
    raise ConfigError(f"unknown ensemble kind {kind!r}")


def config_digest(resolved: dict) -> str:
    """Content hash of the result-determining configuration."""
    keys = ("ensemble", "d", "r", "a", "b", "A", "B", "X0",
            "n_grid", "trials", "delta", "depth", "seed")
    payload = {k: resolved[k] for k in keys if k in resolved}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _manifest(command: str, resolved: dict) -> dict:
    return {
        "command": command,
        "config_digest": config_digest(resolved),
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "master_seed": resolved["seed"],
    }


def _quantiles(values: list) -> dict:
    arr = np.asarray(values)
    return {
        "min": float(arr.min()),
        "q25": float(np.quantile(arr, 0.25)),
        "median": float(np.median(arr)),
        "q75": float(np.quantile(arr, 0.75)),
        "max": float(arr.max()),
        "mean": float(arr.mean()),
    }


def write_records_csv(path: Path, records, max_depth: int) -> None:
    header = CSV_BASE_COLUMNS + [f"term_err_{k}" for k in range(1, max_depth + 1)]
    lines = [",".join(header)]
    for r in records:
        cells = [
            str(r.n),
            str(r.trial_index),
            format_float(r.err_total),
            format_float(r.err_mean_part),
            format_float(r.err_exp_part),
        ]
        cells += [format_float(v) for v in r.term_errs]
        cells += [""] * (max_depth - len(r.term_errs))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def _summarize(config, records, resolved, only_k=None):
    spec = config.ensemble
    L = ensemble_bound(spec)
    per_n = []
    restriction_failed = False
    for n in config.n_grid:
        n_records = [r for r in records if r.n == n]
        depth = config.depth_for(n)
        entry = {
            "n": n,
            "trials": len(n_records),
            "depth": depth,
            "err_total": _quantiles([r.err_total for r in n_records]),
            "err_mean_part": _quantiles([r.err_mean_part for r in n_records]),
            "err_exp_part": n_records[0].err_exp_part,
        }
        if bounds.restriction_ok(L, n, spec.d, config.delta):
            threshold = bounds.theorem_bound(L, n, spec.d, config.delta)
            exceed = sum(r.err_total > threshold for r in n_records)
            entry["theorem"] = {
                "bound": threshold,
                "exceed_frequency": exceed / len(n_records),
            }
        else:
            entry["theorem"] = None
            entry["restriction_reason"] = bounds.restriction_reason(
                L, n, spec.d, config.delta
            )
            restriction_failed = True
        gamma_entries = []
        ks = [only_k] if only_k else range(1, depth + 1)
        for k in ks:
            if k > depth or not bounds.k_condition(k, n, spec.d, config.delta):
                continue
            threshold = bounds.gamma_k(L, n, k, spec.d, config.delta)
            exceed = sum(r.term_errs[k - 1] > threshold for r in n_records)
            gamma_entries.append(
                {
                    "k": k,
                    "threshold": threshold,
                    "exceed_frequency": exceed / len(n_records),
                }
            )
        entry["gamma"] = gamma_entries
        per_n.append(entry)
    try:
        fit = montecarlo.rate_fit(records)
        rate = {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
            "per_n_median": [[n, m] for n, m in fit.per_n_median],
        }
    except ValueError:
        rate = None
    summary = {"config": resolved, "bound_L": L, "per_n": per_n, "rate_fit": rate}
    return summary, restriction_failed


def cmd_bounds(args) -> int:
    try:
        report = bounds.build_report(args.L, args.n, args.d, args.delta)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = {
        "L": report.L,
        "n": report.n,
        "d": report.d,
        "delta": report.delta,
        "restriction_ok": report.restriction_ok,
        "restriction_reason": report.restriction_reason,
        "gamma": list(report.gamma),
        "theorem_bound": report.theorem_bound,
        "lemma_exp_bound": report.lemma_exp_bound,
        "lemma_tail_bound": report.lemma_tail_bound,
        "expectation_bound": report.expectation_bound,
    }
    print(dumps(payload))
    if args.strict and not report.restriction_ok:
        return 3
    return 0


def _run_simulation(args, command: str) -> int:
    resolved = resolve_simulate_config(args)
    spec = build_ensemble(resolved)
    config = montecarlo.ExperimentConfig(
        ensemble=spec,
        n_grid=resolved["n_grid"],
        trials=resolved["trials"],
        delta=resolved["delta"],
        depth=resolved["depth"],
        master_seed=resolved["seed"],
    )
    try:
        config.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if command == "rate":
        if len(config.n_grid) < 3 or config.trials < 30:
            raise ConfigError("rate needs at least 3 grid sizes and 30 trials each")
    records = montecarlo.run_error_trials(config, threads=resolved["threads"])
    summary, restriction_failed = _summarize(
        config, records, _jsonable(resolved), only_k=getattr(args, "k", None)
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    max_depth = max(config.depth_for(n) for n in config.n_grid)
    write_records_csv(out_dir / "records.csv", records, max_depth)
    (out_dir / "summary.json").write_text(dumps(summary) + "\n")
    (out_dir / "manifest.json").write_text(dumps(_manifest(command, resolved)) + "\n")
    print(f"wrote {out_dir / 'records.csv'}")
    print(f"wrote {out_dir / 'summary.json'}")
    print(f"wrote {out_dir / 'manifest.json'}")
    if args.strict and restriction_failed:
        return 3
    return 0


def _jsonable(resolved: dict) -> dict:
    return {k: v for k, v in resolved.items()}


def cmd_simulate(args) -> int:
    return _run_simulation(args, "simulate")


def cmd_rate(args) -> int:
    return _run_simulation(args, "rate")


def cmd_scalar_floor(args) -> int:
    n_grid = _parse_int_list(args.n)
    if not n_grid:
        raise ConfigError("empty grid")
    results = montecarlo.scalar_floor_check(n_grid, args.trials, args.seed)
    print(dumps({"results": [{"n": n, "median": med} for n, med in results]}))
    return 0


def cmd_baranyai(args) -> int:
    if args.N < 1 or args.k < 1 or args.N % args.k != 0:
        print(f"error: k = {args.k} must divide N = {args.N}", file=sys.stderr)
        return 2
    family = baranyai.build_partitions(args.N, args.k)
    payload = {
        "N": family.N,
        "k": family.k,
        "class_count": len(family.classes),
        "verified": baranyai.verify_family(family),
        "classes": [[list(block) for block in cls] for cls in family.classes],
    }
    print(dumps(payload))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matprodlab",
        description="Concentration experiments for normalized random matrix products.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="evaluate all closed-form bounds as JSON")
    p.add_argument("--L", type=float, required=True, help="uniform norm bound")
    p.add_argument("--n", type=int, required=True, help="product length")
    p.add_argument("--d", type=int, required=True, help="matrix dimension")
    p.add_argument("--delta", type=float, required=True, help="confidence parameter")
    p.add_argument("--strict", action="store_true",
                   help="exit 3 when the admissibility restriction fails")
    p.set_defaults(func=cmd_bounds)

    for name, func, help_text in (
        ("simulate", cmd_simulate, "run error trials, write CSV/JSON artifacts"),
        ("rate", cmd_rate, "simulate with a required rate-fit summary"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--n", help="override grid, comma separated")
        p.add_argument("--trials", type=int)
        p.add_argument("--delta", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--k", type=int, help="report term exceedance only for this k")
        p.add_argument("--threads", type=int)
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--strict", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("scalar-floor", help="median sqrt(n)|Z_n - 1| for scalar signs")
    p.add_argument("--n", required=True, help="grid, comma separated")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_scalar_floor)

    p = sub.add_parser("baranyai", help="build and verify parallel classes")
    p.add_argument("--N", type=int, required=True, help="ground set size")
    p.add_argument("--k", type=int, required=True, help="block size (must divide N)")
    p.set_defaults(func=cmd_baranyai)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except montecarlo.NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
