"""Command-line front end.

Subcommands:
  closed-form   exact binary trade-off surface -> CSV
  solve         one numerical cell -> CSV row
  sweep         grid of numerical cells -> CSV
  pfr-sim       Monte Carlo codec simulation -> JSON report

Every run writes a manifest JSON (flags, seed, timestamp) next to its
output. Outputs themselves are deterministic given the flags and seed; the
timestamp lives only in the manifest. CSV files always carry a header row,
a fixed column order, and 6-decimal values. Exit codes: 0 success,
1 runtime failure or infeasible cell, 2 usage error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys

import numpy as np

from .binary_rd import BinarySourceSpec, closed_form_rate, optimal_channel, spec_from_joint
from .distortion import DistortionSpec
from .errors import SemrdError
from .pfr import PfrConfig, simulate
from .probcore import Channel, JointSource, load_source_json
from .solver import SolverConfig, sweep_results

_LN2 = float(np.log(2.0))


def _parse_grid(text: str, parser: argparse.ArgumentParser, flag: str) -> np.ndarray:
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        parser.error(f"{flag} must look like a:b:n, got {text!r}")
    if n < 1:
        parser.error(f"{flag} needs at least one point, got n={n}")
    if b < a:
        parser.error(f"{flag} must have a <= b, got {text!r}")
    return np.linspace(a, b, n)


def _axis(parser, args, scalar, grid, flag_scalar, flag_grid, required=True):
    if scalar is not None and grid is not None:
        parser.error(f"pass either {flag_scalar} or {flag_grid}, not both")
    if grid is not None:
        return _parse_grid(grid, parser, flag_grid)
    if scalar is not None:
        return np.array([scalar], dtype=np.float64)
    if required:
        parser.error(f"one of {flag_scalar} or {flag_grid} is required")
    return None


def _write_manifest(out_path: str, command: str, args: argparse.Namespace) -> None:
    flags = {k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None}
    manifest = {
        "command": command,
        "flags": flags,
        "seed": getattr(args, "seed", None),
        "output": out_path,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    with open(out_path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.6f}"


def _load_source(parser, args) -> tuple[JointSource, dict]:
    if args.source is not None:
        with open(args.source, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        return load_source_json(args.source), payload
    if args.q is None:
        parser.error("either --source or --q is required")
    rho = args.rho if args.rho is not None else 0.5
    return BinarySourceSpec(rho, args.q, args.q).joint_source(), {}


def cmd_closed_form(parser, args) -> int:
    rho = args.rho if args.rho is not None else 0.5
    if args.q is None:
        parser.error("--q is required for closed-form")
    spec = BinarySourceSpec(rho, args.q, args.q)
    dp_axis = _axis(parser, args, args.dp, args.dp_grid, "--dp", "--dp-grid")
    do_axis = _axis(parser, args, args.do, args.do_grid, "--do", "--do-grid")
    scale = 1.0 if args.unit == "bits" else _LN2
    rows = []
    for do_v in do_axis:
        for dp_v in dp_axis:
            rows.append((dp_v, do_v, closed_form_rate(spec, float(dp_v), float(do_v)) * scale))
    _write_csv(args.out, ["d_p", "d_o", f"rate_{args.unit}"], rows)
    _write_manifest(args.out, "closed-form", args)
    return 0


def _solver_rows(source, spec, dp_axis, do_axis, cfg, y_size):
    rows = []
    any_infeasible = False
    for dp_v, do_v, res in sweep_results(source, spec, dp_axis, do_axis, cfg, y_size):
        rows.append((dp_v, do_v, res.rate, res.achieved_dp, res.achieved_do, res.status, cfg.seed))
        any_infeasible |= not res.feasible
    return rows, any_infeasible


def cmd_solve(parser, args) -> int:
    source, _ = _load_source(parser, args)
    if args.dp is None or args.do is None:
        parser.error("solve needs scalar --dp and --do")
    spec = DistortionSpec.from_names(args.semantic, args.symbolic)
    cfg = SolverConfig(seed=args.seed)
    rows, any_infeasible = _solver_rows(source, spec, [args.dp], [args.do], cfg, args.ysize)
    _write_csv(args.out, ["d_p", "d_o", "rate_bits", "achieved_dp", "achieved_do", "status", "seed"], rows)
    _write_manifest(args.out, "solve", args)
    return 1 if any_infeasible else 0


def cmd_sweep(parser, args) -> int:
    source, _ = _load_source(parser, args)
    dp_axis = _axis(parser, args, args.dp, args.dp_grid, "--dp", "--dp-grid")
    do_axis = _axis(parser, args, args.do, args.do_grid, "--do", "--do-grid")
    spec = DistortionSpec.from_names(args.semantic, args.symbolic)
    cfg = SolverConfig(seed=args.seed)
    rows, any_infeasible = _solver_rows(source, spec, dp_axis, do_axis, cfg, args.ysize)
    _write_csv(args.out, ["d_p", "d_o", "rate_bits", "achieved_dp", "achieved_do", "status", "seed"], rows)
    _write_manifest(args.out, "sweep", args)
    return 1 if any_infeasible else 0


def cmd_pfr_sim(parser, args) -> int:
    source, payload = _load_source(parser, args)
    spec = DistortionSpec.from_names(args.semantic, args.symbolic)
    binary = None
    if args.source is None:
        binary = BinarySourceSpec(args.rho if args.rho is not None else 0.5, args.q, args.q)
    if payload.get("channel") is not None:
        channel = Channel(np.asarray(payload["channel"], dtype=np.float64))
    else:
        if args.dp is None or args.do is None:
            parser.error("pfr-sim needs --dp and --do to derive the channel (or a 'channel' entry in --source)")
        if binary is None:
            binary = spec_from_joint(source)
        if binary is None or not binary.is_symmetric:
            parser.error("deriving a channel from (--dp, --do) requires the symmetric binary family")
        channel = optimal_channel(binary, args.dp, args.do)

    cfg = PfrConfig(n=args.n, trials=args.trials, seed=args.seed)
    report = simulate(source, channel, spec, cfg)
    doc = report.to_json_dict()
    if binary is not None and binary.is_symmetric and args.dp is not None and args.do is not None:
        reference = closed_form_rate(binary, args.dp, args.do)
        doc["closed_form_rate"] = reference
        doc["bound_gap_vs_closed_form"] = report.bound_rhs - reference
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    _write_manifest(args.out, "pfr-sim", args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semrd",
        description="Semantic rate-distortion toolkit: closed forms, numerical solver, codec simulation.",
        epilog="SEMRD_BACKEND selects the numba or numpy kernels; SEMRD_THREADS caps solver parallelism.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_n=False):
        p.add_argument("--source", help="JSON source description (joint matrix, optional labels)")
        p.add_argument("--q", type=float, help="symmetric binary family parameter q1 = q2 = q")
        p.add_argument("--rho", type=float, help="p_S(0), default 0.5")
        p.add_argument("--dp", type=float, help="semantic distortion bound")
        p.add_argument("--do", type=float, help="symbolic distortion bound")
        p.add_argument("--dp-grid", help="semantic bound grid a:b:n")
        p.add_argument("--do-grid", help="symbolic bound grid a:b:n")
        p.add_argument("--semantic", default="tv", help="tv | kl | chi2 | matrix:<generator csv>")
        p.add_argument("--symbolic", default="hamming", help="hamming | mse | matrix:<cost csv>")
        p.add_argument("--ysize", type=int, help="output alphabet size, default |X|")
        if needs_n:
            p.add_argument("--n", type=int, required=True, help="block length")
            p.add_argument("--trials", type=int, required=True, help="Monte Carlo rounds")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="output file path")

    p_cf = sub.add_parser("closed-form", help="exact binary trade-off surface")
    common(p_cf)
    p_cf.add_argument("--unit", choices=("bits", "nats"), default="bits", help="rate unit in the CSV header")
    p_cf.set_defaults(func=cmd_closed_form)

    p_solve = sub.add_parser("solve", help="numerically solve one (dp, do) cell")
    common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="numerically solve a grid of cells")
    common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_pfr = sub.add_parser("pfr-sim", help="Monte Carlo codec simulation")
    common(p_pfr, needs_n=True)
    p_pfr.set_defaults(func=cmd_pfr_sim)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses exit code 2 for usage errors
        return int(exc.code or 0)
    try:
        return args.func(parser, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except SemrdError as exc:
        print(f"semrd: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"semrd: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
