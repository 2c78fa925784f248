"""Command-line interface.

Subcommands: solve-partition, diffusion, scan, evolve, simulate,
billiard.  JSON reports go to stdout or --out; CSV reports use '.'
decimals, LF line endings and a provenance comment line.  Exit codes:
0 success, 2 validation failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

from . import billiard as _billiard
from . import density as _density
from . import montecarlo as _mc
from .errors import (
    ConsistencyError,
    DetdiffError,
    MapDefinitionError,
    NUMERICAL_ERRORS,
    VALIDATION_ERRORS,
)
from .maps import PiecewiseLinearLiftMap, map_from_spec
from .partition import (
    MarkovPartition,
    PartitionEquationSystem,
    solve_partition_system,
    solve_three_interval,
    validate_consistency,
)
from .reports import VERSION, canonical_json, provenance_line, render_csv, spec_hash
from .rng import DEFAULT_SEED
from .transfer import build_transition_matrices, diffusion_spectral

_SURD_RE = re.compile(
    r"""^\s*
    (?:(?P<a>[+-]?\d+(?:\.\d+)?)\s*)?              # optional rational part
    (?:(?P<sign>[+-])\s*)?                         # sign of the surd term
    (?:(?P<b>\d+(?:\.\d+)?)\s*\*\s*)?              # optional multiplier
    sqrt\(\s*(?P<c>\d+(?:\.\d+)?)\s*\)
    \s*$""",
    re.VERBOSE,
)


def parse_algebraic(text) -> float:
    """Parse a number or an 'a +- b*sqrt(c)' literal; reject anything else."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip()
    try:
        return float(s)
    except ValueError:
        pass
    m = _SURD_RE.match(s)
    if not m:
        raise ValueError(f"cannot parse algebraic constant {text!r} "
                         "(use forms like 3, 2.5, sqrt(2) or 2+sqrt(3))")
    a = float(m.group("a")) if m.group("a") else 0.0
    if m.group("a") and m.group("sign") is None:
        raise ValueError(f"missing sign between rational and surd part in {text!r}")
    sign = -1.0 if m.group("sign") == "-" else 1.0
    b = float(m.group("b")) if m.group("b") else 1.0
    c = float(m.group("c"))
    return a + sign * b * math.sqrt(c)


def _load_json_arg(value: str):
    """Inline JSON, or the content of a file when `value` is a path."""
    text = value
    if not value.lstrip().startswith(("{", "[")) and os.path.exists(value):
        with open(value) as fh:
            text = fh.read()
    return json.loads(text)


def _map_spec_from_args(tokens) -> dict:
    """--map accepts inline JSON, a JSON file path, or 'type key=value ...'."""
    head = tokens[0]
    if head.lstrip().startswith("{") or os.path.exists(head):
        if len(tokens) > 1:
            raise MapDefinitionError("unexpected extra tokens after JSON map spec")
        spec = _load_json_arg(head)
    else:
        spec = {"type": head}
        for tok in tokens[1:]:
            if "=" not in tok:
                raise MapDefinitionError(f"map argument {tok!r} is not key=value")
            key, val = tok.split("=", 1)
            spec[key] = val
    return spec


def _resolve_map(spec: dict) -> PiecewiseLinearLiftMap:
    spec = dict(spec)
    for key in ("lambda", "xi"):
        if key in spec:
            spec[key] = parse_algebraic(spec[key])
    if "p" in spec:
        spec["p"] = int(spec["p"])
    if "breakpoints" in spec:
        spec["breakpoints"] = [parse_algebraic(v) for v in spec["breakpoints"]]
    if "values" in spec:
        spec["values"] = [[parse_algebraic(v) for v in pair] for pair in spec["values"]]
    return map_from_spec(spec)


def _partition_for(args, lift_map) -> MarkovPartition:
    """Partition from --partition, --partition-system, or map breakpoints."""
    if getattr(args, "partition", None):
        bps = [parse_algebraic(v) for v in _load_json_arg(args.partition)]
        part = MarkovPartition(tuple(bps))
    elif getattr(args, "partition_system", None):
        system = PartitionEquationSystem.from_dict(_load_json_arg(args.partition_system))
        solved = solve_partition_system(system)
        part = MarkovPartition.symmetric(solved.breakpoints, args.include_zero)
    else:
        candidates = [tuple(lift_map.breakpoints)]
        if 0.0 not in lift_map.breakpoints:
            with_zero = tuple(sorted(set(lift_map.breakpoints) | {0.0}))
            candidates.append(with_zero)
        part = None
        for bps in candidates:
            cand = MarkovPartition(bps)
            if validate_consistency(lift_map, cand):
                part = cand
                break
        if part is None:
            raise ConsistencyError(
                "no consistent partition found from the map breakpoints; "
                "pass --partition or --partition-system")
        return part
    report = validate_consistency(lift_map, part)
    if not report:
        raise ConsistencyError(
            f"partition inconsistent with map (worst violation "
            f"{report.worst_violation:.3g})")
    return part


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_report(payload: dict, provenance: dict) -> str:
    return canonical_json({"provenance": provenance, **payload}) + "\n"


# -- subcommand implementations ---------------------------------------------


def cmd_solve_partition(args):
    if bool(args.system) == bool(args.three_interval):
        raise MapDefinitionError("pass exactly one of --system or --three-interval")
    if args.three_interval:
        try:
            m, n, e1, e2 = (int(v) for v in args.three_interval.split(","))
        except ValueError as exc:
            raise MapDefinitionError(
                "--three-interval expects 'm,n,eps1,eps2'") from exc
        lam, xi = solve_three_interval(m, n, e1, e2)
        payload = {"lambda": lam, "xi": xi,
                   "equations": {"lam*xi - m - eps2*xi": lam * xi - m - e2 * xi,
                                 "lam/2 - n - eps1*xi": lam / 2 - n - e1 * xi}}
        prov = {"version": VERSION, "input": f"three-interval:{m},{n},{e1},{e2}"}
    else:
        data = _load_json_arg(args.system)
        solved = solve_partition_system(PartitionEquationSystem.from_dict(data))
        payload = {"lambda": solved.lam,
                   "breakpoints": list(solved.breakpoints),
                   "polynomial": list(solved.polynomial),
                   "residual": solved.residual}
        prov = {"version": VERSION, "system_hash": spec_hash(data)}
    _emit(args, _json_report(payload, prov))
    return 0


def _method_report(name, args, spec, lift_map):
    if name == "closed-form":
        d = _density.closed_form_d(lift_map)
        return {"d": d, "drift": 0.0, "method": "closed-form", "diagnostics": {}}
    if name == "spectral":
        part = _partition_for(args, lift_map)
        tset = build_transition_matrices(lift_map, part)
        rep = diffusion_spectral(tset)
        out = rep.to_json_dict()
        out["partition"] = list(part.breakpoints)
        return out
    if name in ("heuristic", "omega"):
        if spec.get("type") != "linear":
            raise MapDefinitionError(f"{name} estimate applies to linear maps only")
        lam = parse_algebraic(spec["lambda"])
        d = _density.heuristic_d(lam) if name == "heuristic" \
            else _density.omega_approx_d(lam)
        return {"d": d, "drift": 0.0, "method": name, "diagnostics": {}}
    if name == "mc":
        samples = _mc.simulate_ensemble(lift_map, args.N, args.n, args.seed)
        stats = _mc.estimate_stats(samples, args.n)
        return {"d": stats.d_estimate, "drift": stats.drift_estimate,
                "method": "monte-carlo",
                "diagnostics": {"stderr": stats.d_stderr, "ks": stats.ks_statistic,
                                "n_samples": stats.sample_count,
                                "n_steps": stats.step_count}}
    raise MapDefinitionError(f"unknown method {name!r}")


def cmd_diffusion(args):
    spec = _map_spec_from_args(args.map)
    lift_map = _resolve_map(spec)
    prov = {"version": VERSION, "map_hash": spec_hash(spec), "seed": args.seed}

    if args.method == "all":
        methods = {}
        for name in ("closed-form", "spectral", "heuristic", "omega", "mc"):
            try:
                methods[name] = _method_report(name, args, spec, lift_map)
            except (DetdiffError, ValueError) as exc:
                methods[name] = {"error": f"{type(exc).__name__}: {exc}"}
        good = {k: v for k, v in methods.items() if "error" not in v}
        if not good:
            raise ConsistencyError("every method failed; see individual errors")
        deltas = {}
        names = sorted(good)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                deltas[f"{a}|{b}"] = abs(good[a]["d"] - good[b]["d"])
        payload = {"map": spec, "methods": methods, "deltas": deltas}
    else:
        payload = {"map": spec,
                   "methods": {args.method: _method_report(args.method, args,
                                                           spec, lift_map)}}
    _emit(args, _json_report(payload, prov))
    return 0


def cmd_scan(args):
    if args.lambda_grid:
        lams = [parse_algebraic(v) for v in args.lambda_grid.split(",") if v.strip()]
    else:
        lo = getattr(args, "from")
        if lo is None or args.to is None:
            raise MapDefinitionError("pass --lambda-grid or both --from and --to")
        if args.step <= 0:
            raise MapDefinitionError("--step must be positive")
        count = int(round((args.to - lo) / args.step)) + 1
        if count < 1:
            lams = []
        else:
            lams = [lo + i * args.step for i in range(count)]
    rows = _mc.scan_lambda(lams, args.N, args.n, args.seed)
    text = render_csv(
        ["lambda", "d_mc", "stderr", "d_heuristic", "d_omega", "ks"],
        rows,
        provenance_line(seed=args.seed, N=args.N, n=args.n),
    )
    _emit(args, text)
    return 0


def cmd_evolve(args):
    spec = _map_spec_from_args(args.map)
    lift_map = _resolve_map(spec)
    part = _partition_for(args, lift_map)
    tset = build_transition_matrices(lift_map, part)
    rep = diffusion_spectral(tset)
    checkpoints = sorted({int(c) for c in args.checkpoints.split(",")})
    if any(c < 1 for c in checkpoints):
        raise MapDefinitionError("checkpoints must be positive step counts")

    dens = _density.unit_pulse(part.breakpoints)
    done = 0
    trace = []
    prov_fields = {"map": spec_hash(spec), "d_spectral": rep.d}
    for c in checkpoints:
        dens = _density.evolve(tset, dens, c - done)
        done = c
        profile = _density.gaussian_profile(rep.d, rep.drift, rep.alpha,
                                            part.breakpoints, c)
        dist = _density.kolmogorov_distance(dens, profile)
        trace.append({"n": c, "kolmogorov_distance": dist})
        if args.out:
            snap = render_csv(["k", "j", "density", "mass"], list(dens.rows()),
                              provenance_line(n=c, **prov_fields))
            with open(f"{args.out}-n{c}.csv", "w", newline="") as fh:
                fh.write(snap)

    text = render_csv(["n", "kolmogorov_distance"], trace,
                      provenance_line(**prov_fields))
    if args.out:
        with open(f"{args.out}-trace.csv", "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate(args):
    spec = _map_spec_from_args(args.map)
    lift_map = _resolve_map(spec)
    samples = _mc.simulate_ensemble(lift_map, args.N, args.n, args.seed)
    stats = _mc.estimate_stats(samples, args.n)
    row = {
        "n_samples": stats.sample_count, "n_steps": stats.step_count,
        "mean": stats.mean, "variance": stats.variance,
        "d_estimate": stats.d_estimate, "drift_estimate": stats.drift_estimate,
        "d_stderr": stats.d_stderr, "ks_statistic": stats.ks_statistic,
    }
    text = render_csv(list(row), [row],
                      provenance_line(map=spec_hash(spec), seed=args.seed))
    _emit(args, text)
    return 0


def cmd_billiard(args):
    lam = parse_algebraic(getattr(args, "lambda"))
    kick = _billiard.sawtooth_kick(lam)
    checkpoints = None
    if args.checkpoints:
        checkpoints = [int(c) for c in args.checkpoints.split(",")]
    report = _billiard.simulate_channel(kick, args.N, args.n, args.seed,
                                        checkpoints=checkpoints)
    text = render_csv(
        ["checkpoint", "variance", "theoretical_variance", "exponent_so_far"],
        list(report.rows()),
        provenance_line(seed=args.seed, **{"lambda": lam},
                        exponent=report.growth_exponent,
                        discarded=report.discarded),
    )
    _emit(args, text)
    if report.discard_warning:
        print(f"warning: {report.discarded} samples discarded "
              f"({report.discarded / args.N:.1%})", file=sys.stderr)
    return 0


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detdiff",
        description="Deterministic diffusion in piecewise-linear lifting maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_map(p):
        p.add_argument("--map", nargs="+", required=True,
                       help="inline JSON, a JSON file, or 'linear lambda=2+sqrt(3)'")

    def add_partition(p):
        p.add_argument("--partition", help="explicit JSON list of cell breakpoints")
        p.add_argument("--partition-system",
                       help="JSON boundary-equation system (inline or file)")
        p.add_argument("--include-zero", action="store_true",
                       help="include 0 as a breakpoint when building from a system")

    def add_run(p, default_n):
        p.add_argument("--N", type=int, default=100_000, help="ensemble size")
        p.add_argument("--n", type=int, default=default_n, help="iteration steps")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = sub.add_parser("solve-partition", help="solve a boundary-equation system")
    p.add_argument("--system", help="JSON system (inline or file)")
    p.add_argument("--three-interval", help="closed three-cell family: 'm,n,eps1,eps2'")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve_partition)

    p = sub.add_parser("diffusion", help="diffusion coefficient by one or all methods")
    add_map(p)
    add_partition(p)
    p.add_argument("--method", default="all",
                   choices=["closed-form", "spectral", "heuristic", "omega", "mc", "all"])
    add_run(p, default_n=50)
    p.add_argument("--out")
    p.set_defaults(func=cmd_diffusion)

    p = sub.add_parser("scan", help="Monte Carlo D(lambda) scan to CSV")
    p.add_argument("--from", type=float, dest="from")
    p.add_argument("--to", type=float)
    p.add_argument("--step", type=float, default=0.25)
    p.add_argument("--lambda-grid", help="comma-separated grid, overrides --from/--to")
    add_run(p, default_n=50)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("evolve", help="evolve the unit pulse and trace the Gaussian gap")
    add_map(p)
    add_partition(p)
    p.add_argument("--checkpoints", default="10,50,100,500")
    p.add_argument("--out", help="prefix for snapshot and trace CSV files")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("simulate", help="one ensemble simulation to CSV")
    add_map(p)
    add_run(p, default_n=50)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("billiard", help="billiard-channel ensemble to CSV")
    p.add_argument("--lambda", required=True, help="sawtooth kick amplitude")
    add_run(p, default_n=200)
    p.add_argument("--checkpoints", help="comma-separated step counts")
    p.add_argument("--out")
    p.set_defaults(func=cmd_billiard)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VALIDATION_ERRORS as exc:
        print(f"error[validation]: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error[validation]: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"error[numerical]: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error[validation]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
