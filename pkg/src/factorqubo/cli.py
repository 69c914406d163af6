"""``factor`` command line: table1, solve, sweep, diagnose.

Exit codes: 0 success, 1 usage error, 2 solver capacity exceeded.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime
import json
import sys
from typing import List, Optional

from .config import read_config
from .hardware import HardwareModel, degrade
from .harness import (
    KNOWN_FACTORS,
    SweepConfig,
    diagnose,
    emit_report,
    run_sweep,
    run_table1,
)
from .objective import ProblemSpec, Variant, build_objective
from .quadratize import quadratize, safe_penalty_bound
from .solve import CSV_HEADER, AnnealSchedule, VariableCountExceeded, solve_exact, solve_sa

EXIT_USAGE = 1
EXIT_CAPACITY = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _table1_entry(text: str):
    try:
        n, factors = text.split(":")
        x, y = factors.split(",")
        return int(n), int(x), int(y)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N:x,y, got {text!r}") from None


def _penalty(text: str):
    if text == "safe":
        return text
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer or 'safe'") from None
    if v < 1:
        raise argparse.ArgumentTypeError("S must be >= 1")
    return v


def _add_problem_args(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--variant", default="EQ2", choices=[v.value for v in Variant])
    p.add_argument("--x-bits", type=int, default=4)
    p.add_argument("--y-bits", type=int, default=4)
    p.add_argument("--s", type=_penalty, default="safe", help="ancilla penalty, int or 'safe'")
    p.add_argument("--precision-bits", type=int)
    p.add_argument("--noise-sigma", type=float)
    p.add_argument("--chain-length", type=int)
    p.add_argument("--param-chain", type=int)
    p.add_argument("--coeff-range", type=float)
    p.add_argument("--seed", type=int, default=0)


def _hardware(args) -> Optional[HardwareModel]:
    given = {
        "precision_bits": args.precision_bits,
        "noise_sigma": args.noise_sigma,
        "chain_length": args.chain_length,
        "param_chain": args.param_chain,
        "coeff_range": args.coeff_range,
    }
    given = {k: v for k, v in given.items() if v is not None}
    return HardwareModel(**given) if given else None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="factor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("table1", help="energy decomposition at known factors")
    t.add_argument("--n", dest="entries", type=_table1_entry, action="append",
                   help="N:x,y (repeatable); defaults to 15, 91 and 899")
    t.add_argument("--format", choices=["text", "json"], default="text")

    s = sub.add_parser("solve", help="build, quadratize, optionally degrade, and solve")
    _add_problem_args(s)
    s.add_argument("--solver", choices=["exact", "sa"], default="exact")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--sweeps", type=int, default=2000)
    s.add_argument("--csv", metavar="FILE", help="write one row per sample")

    w = sub.add_parser("sweep", help="param_chain sweep from a config file")
    w.add_argument("--config", required=True)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--out", required=True)
    w.add_argument("--format", choices=["json", "csv"], default="json")
    w.add_argument("--paper-scale", action="store_true", help="1000 samples per run")

    d = sub.add_parser("diagnose", help="coefficient dynamic range and quantization")
    _add_problem_args(d)
    return parser


def _cmd_table1(args) -> int:
    entries = args.entries or [(n, *xy) for n, xy in KNOWN_FACTORS.items()]
    rows = run_table1(entries)
    if args.format == "json":
        out = [
            {"n": n, "x": x, "y": y, "term_a": r.term_a, "term_b": r.term_b,
             "term_c": r.term_c, "sum": r.sum if r.integral else str(r.sum)}
            for n, x, y, r in rows
        ]
        print(json.dumps(out, indent=2))
        return 0
    print(f"{'N':>5} {'x':>4} {'y':>4} {'N^2(N-xy)^2':>14} {'-N^2+2N^3-N^4':>18} "
          f"{'x(x-y)^2':>10} {'sum/4':>18}")
    for n, x, y, r in rows:
        print(f"{n:>5} {x:>4} {y:>4} {r.term_a:>14,} {r.term_b:>18,} {r.term_c:>10,} "
              f"{str(r.sum) if not r.integral else format(r.sum, ','):>18}")
    return 0


def _cmd_solve(args) -> int:
    spec = ProblemSpec(args.n, args.x_bits, args.y_bits, Variant(args.variant))
    poly = build_objective(spec)
    s = safe_penalty_bound(poly) if args.s == "safe" else args.s
    q = quadratize(poly, s)
    hw = _hardware(args)
    target = degrade(q, hw, args.seed) if hw else q
    if args.solver == "exact":
        res = solve_exact(target, spec)
    else:
        res = solve_sa(target, spec, AnnealSchedule(sweeps=args.sweeps, seed=args.seed), args.samples)
    best = res.best
    print(f"n={spec.n} variant={spec.variant} bits={spec.x_bits}/{spec.y_bits} S={s} "
          f"ancillas={len(q.ancilla_defs)} solver={args.solver}")
    if hw:
        print(f"scale_factor={target.scale_factor:.6g} precision_bits={hw.precision_bits} "
              f"chain_length={hw.chain_length} param_chain={hw.param_chain}")
    print(f"best_energy={res.best_energy} best=(x={best.x}, y={best.y}) "
          f"samples={len(res.samples)} distinct={res.distinct_count} valid={res.valid_count}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            w.writerows(res.to_csv_rows())
    return 0


def _cmd_sweep(args) -> int:
    cfg = SweepConfig.from_config(read_config(args.config))
    if args.paper_scale:
        cfg = dataclasses.replace(cfg, samples_per_run=1000)
    report = run_sweep(cfg, args.seed)
    report.generated_at = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    data = emit_report(report, args.format)
    with open(args.out, "wb") as fh:
        fh.write(data)
    summ = report.summary
    print(f"{summ['total_runs']} runs, {summ['total_valid']} valid samples, "
          f"{summ['saturated_runs']} saturated; wrote {args.out}")
    return 0


def _cmd_diagnose(args) -> int:
    spec = ProblemSpec(args.n, args.x_bits, args.y_bits, Variant(args.variant))
    hw = _hardware(args) or HardwareModel()
    info = diagnose(spec, args.s, hw, args.seed)
    print(json.dumps(info, indent=2, default=str))
    return 0


_COMMANDS = {
    "table1": _cmd_table1,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "diagnose": _cmd_diagnose,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except VariableCountExceeded as exc:
        print(f"factor: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValueError, KeyError, OSError) as exc:
        print(f"factor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
