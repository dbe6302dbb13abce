"""Command-line experiment runner.

Subcommands: ``bench-fc``, ``bench-gap``, ``spectral``, ``bounds``.
Exit codes: 0 success, 1 property violation, 2 usage error, 3 infeasible
experiment.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import metadata

import numpy as np

from . import bounds
from ._io import csv_text, dumps
from .errors import DensintError, NotFound, PackingFailure, PropertyViolation
from .estimators import Metropolis, SimpleMC, delta_star, prior_averaged_rmse, worst_case_over_family
from .geometry import ConvexBody, packing_on_ball
from .instances import IntegrandOracle, ProblemInstance, WeightOracle, fad_family, sample_fc_prior
from .spectral import ball_walk_reference, discretize_1d, local_conductance_exact_1d, spectral_report

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3

DEFAULTS = {
    "bench-fc": {"C": [4.0, 8.0, 32.0], "n": [256, 1024], "draws": 200, "reps": 50},
    "bench-gap": {"d": 2, "alpha": 6.0, "m": 8, "n": 256, "reps": 400, "delta": None, "min_ratio": 1.5},
    "spectral": {"N": [8, 12, 16], "alpha": [0.0, 1.0, 2.0, 4.0], "delta": [0.25, 0.5]},
}


class UsageError(Exception):
    pass


def version_string() -> str:
    try:
        return "v" + metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "v0.0.0-unknown"


def _f1_sampler(n: int):
    """Constant-density analogue of the hard prior (all cells signed, rho = 1)."""
    m = 2 * n

    def sample(rng):
        eps = np.where(rng.random(m) < 0.5, -1.0, 1.0)

        def f(X):
            return eps[np.minimum((X[:, 0] * m).astype(np.int64), m - 1)]

        return ProblemInstance(ConvexBody.interval(), IntegrandOracle(f), WeightOracle(lambda X: np.ones(len(X)),
                               "ratio-bounded", C=1.0), truth=float(eps.mean()), family_id="f1-signs")

    return sample


def cmd_bench_fc(cfg: dict):
    rows = []
    ok = True
    for C in cfg["C"]:
        for n in cfg["n"]:
            if C == 1:
                sampler = _f1_sampler(n)
            else:
                sampler = (lambda n_, C_: (lambda rng: sample_fc_prior(n_, C_, rng)))(n, C)
            seed = cfg["seed"] + 7919 * len(rows)
            res = prior_averaged_rmse(sampler, SimpleMC(), n, cfg["draws"], cfg["reps"], seed)
            if C == 1:
                lo, hi = 0.0, 1.0 / math.sqrt(n)
            else:
                lo, hi = bounds.lower_bound_fc(n, C), bounds.upper_bound_simple(n, C)
            inside = lo <= res.rmse <= hi
            ok &= inside
            rows.append({"C": float(C), "n": int(n), "empirical_rmse": res.rmse, "lower_bound": lo,
                         "upper_bound": hi, "inside_sandwich": inside})
    return rows, {}, EXIT_OK if ok else EXIT_VIOLATION


def cmd_bench_gap(cfg: dict):
    d, alpha, n = cfg["d"], cfg["alpha"], cfg["n"]
    packing = packing_on_ball(cfg["m"], d)  # PackingFailure -> exit 3
    family = fad_family(d, alpha, packing)
    delta = cfg["delta"] if cfg["delta"] is not None else delta_star(d, alpha)
    rows = []
    worst = {}
    for est in (SimpleMC(), Metropolis(delta)):
        w, reports = worst_case_over_family(family, est, n, cfg["reps"], cfg["seed"])
        worst[est.estimator_id] = w
        for inst, rep in zip(family, reports):
            rows.append({"estimator": est.estimator_id, "index": inst.meta["index"], "sign": inst.meta["sign"],
                         "n": n, "rmse": rep.rmse, "truth": rep.truth})
    ratio = worst["simple"] / worst["metropolis"]
    summary = {
        "worst_simple": worst["simple"],
        "worst_metropolis": worst["metropolis"],
        "ratio_simple_over_metropolis": ratio,
        "min_ratio": cfg["min_ratio"],
        "gap_ok": ratio >= cfg["min_ratio"],
        "delta": delta,
        "lower_bound_nonadaptive": bounds.lower_bound_nonadaptive(n, d, alpha),
        "lower_bound_nonadaptive_valid": bounds.nonadaptive_bound_valid(n, d, alpha),
        "metropolis_asymptotic_ceiling": math.sqrt(bounds.error_const_metropolis(d, delta, alpha) / n),
    }
    return rows, summary, EXIT_OK if summary["gap_ok"] else EXIT_VIOLATION


def cmd_spectral(cfg: dict):
    rows = []
    ok = True
    for N in cfg["N"]:
        for delta in cfg["delta"]:
            l = local_conductance_exact_1d(ball_walk_reference(N, delta))
            for alpha in cfg["alpha"]:
                chain = discretize_1d(lambda X, a=alpha: np.exp(-a * X[:, 0]), delta, N)
                ref = bounds.conductance_lb_metropolis(l, delta, 2.0, 1, alpha)
                rep = spectral_report(chain, label=f"N={N},alpha={alpha:g},delta={delta:g}", reference_bound=ref)
                ok &= rep.cheeger_ok
                row = {"N": N, "alpha": float(alpha), "delta": float(delta), "local_conductance": l}
                row.update(rep.as_dict())
                rows.append(row)
    return rows, {}, EXIT_OK if ok else EXIT_VIOLATION


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        raise UsageError(f"cannot parse value {text!r}")


def cmd_bounds(cfg: dict):
    name = cfg["name"]
    params = dict(cfg.get("params", {}))
    try:
        res = bounds.evaluate(name, **params)
    except NotFound as exc:
        raise UsageError(str(exc))
    except TypeError as exc:
        raise UsageError(f"{name}: {exc}; expected parameters {bounds.parameters(name)}")
    row = {"name": res.name, "value": res.value, "regime": res.regime}
    row.update(res.inputs)
    return [row], {}, EXIT_OK


COMMANDS = {"bench-fc": cmd_bench_fc, "bench-gap": cmd_bench_gap, "spectral": cmd_spectral, "bounds": cmd_bounds}


def _list(kind):
    def parse(text):
        try:
            return [kind(t) for t in text.split(",") if t.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}")
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="base seed (required for benchmarks)")
    common.add_argument("--reps", type=int, help="replications per instance")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--config", help="JSON file whose keys override the flags")

    p = argparse.ArgumentParser(prog="densint", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("bench-fc", parents=[common], help="simple MC on the F_C hard prior vs the bounds")
    s.add_argument("--C", type=_list(float))
    s.add_argument("--n", type=_list(int))
    s.add_argument("--draws", type=int, help="prior draws per (C, n)")

    s = sub.add_parser("bench-gap", parents=[common], help="worst-case RMSE, simple MC vs Metropolis, on B^d")
    s.add_argument("--d", type=int)
    s.add_argument("--alpha", type=float)
    s.add_argument("--m", type=int, help="number of packed balls (family size 2m)")
    s.add_argument("--n", type=int)
    s.add_argument("--delta", type=float, help="override the tuned step size")
    s.add_argument("--min-ratio", dest="min_ratio", type=float)

    s = sub.add_parser("spectral", parents=[common], help="Cheeger checks on discretized 1-D chains")
    s.add_argument("--N", type=_list(int))
    s.add_argument("--alpha", type=_list(float))
    s.add_argument("--delta", type=_list(float))

    s = sub.add_parser("bounds", parents=[common], help="evaluate a bound: NAME key=value ...")
    s.add_argument("name", nargs="?", help=f"one of: {', '.join(bounds.NAMES)}")
    s.add_argument("params", nargs="*", metavar="key=value")
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    cmd = args.command
    cfg = {"command": cmd, "seed": None, "reps": None, "format": "json"}
    cfg.update(DEFAULTS.get(cmd, {}))
    for key, val in vars(args).items():
        if key in ("command", "config", "out") or val is None:
            continue
        if cmd == "bounds" and key == "params":
            params = {}
            for item in val:
                if "=" not in item:
                    raise UsageError(f"bound parameters must be key=value, got {item!r}")
                k, v = item.split("=", 1)
                params[k] = _parse_value(v)
            cfg["params"] = params
            continue
        cfg[key] = val
    if args.config:
        try:
            with open(args.config) as fh:
                override = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        if not isinstance(override, dict):
            raise UsageError("config must be a JSON object")
        cfg.update(override)
    if cmd in ("bench-fc", "bench-gap"):
        if cfg.get("seed") is None:
            raise UsageError("--seed is required")
        if cfg.get("reps") is None:
            cfg["reps"] = DEFAULTS[cmd]["reps"]
        if cfg["reps"] < 2:
            raise UsageError("--reps must be at least 2")
    if cmd == "bench-fc":
        ns = cfg["n"]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise UsageError("the n schedule must be strictly increasing")
        if any(c < 1 for c in cfg["C"]):
            raise UsageError("C must be at least 1")
    if cmd == "bounds" and not cfg.get("name"):
        raise UsageError("bounds needs a bound name")
    if cfg["format"] not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    return cfg


def render(cfg: dict, rows: list, summary: dict) -> str:
    version = version_string()
    if cfg["format"] == "json":
        return dumps({"version": version, "config": cfg, "rows": rows, "summary": summary}, indent=2) + "\n"
    head = f"# densint {version} config={dumps(cfg)}\r\n"
    text = head + csv_text(rows)
    if summary:
        text += csv_text([summary])
    return text


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        cfg = resolve_config(args)
        rows, summary, code = COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"densint: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PackingFailure as exc:
        print(f"densint: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except PropertyViolation as exc:
        print(f"densint: property violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (KeyError, TypeError, ValueError, DensintError) as exc:
        print(f"densint: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(cfg, rows, summary)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
