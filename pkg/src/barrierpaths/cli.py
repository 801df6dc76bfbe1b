"""Command-line interface.

    barrierpaths count    --barrier linear:r=1,s=0 --n 10 --method all
    barrierpaths verify   --barrier linear:r=2,s=1 --n 100
    barrierpaths det      --lower 0,0,0 --upper 0,1,2 --n 2
    barrierpaths simulate --barrier linear:r=1,s=1 --p 1/2 --trials 100000 --seed 1
    barrierpaths classify --barrier linear:r=1,s=0 --p 1/2
    barrierpaths weights  --barrier const:s=0 --p 1/2 --n 64

Exit status: 0 success, 1 verification failure or method disagreement,
2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import __version__
from .barrier import BarrierSpecError, Linear, parse_barrier_spec
from .counting import (
    PRINTED_CONVENTION,
    AmbiguousConvention,
    CellBudgetExceeded,
    InternalInconsistency,
    dp_f,
    kreweras_determinant,
    proctor_counts,
    recurrence_counts,
    resolve_determinant_convention,
    two_barrier_dp,
)
from .series import gf_identity_residual, kernel_identity_check
from .walk import (
    WalkConfig,
    classify_equality,
    escape_from_runs,
    exit_stats_from_runs,
    run_trials,
    truncated_weight_sum,
)

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

if hasattr(sys, "set_int_max_str_digits"):
    # counts run to tens of thousands of digits
    sys.set_int_max_str_digits(0)


class UsageError(Exception):
    def __init__(self, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.position = position


def rat(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def ints(xs: Sequence[int]) -> list[str]:
    return [str(v) for v in xs]


def parse_rational(text: str) -> Fraction:
    num, sep, den = text.partition("/")
    if not sep or not num.isdigit() or not den.isdigit():
        raise UsageError(f"expected NUM/DEN, got {text!r}")
    if int(den) == 0:
        raise UsageError("denominator must be positive")
    return Fraction(int(num), int(den))


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def cmd_count(args) -> tuple[dict, int]:
    b = parse_barrier_spec(args.barrier)
    N = args.n
    runners = {
        "dp": lambda: dp_f(b, N).values,
        "recurrence": lambda: recurrence_counts(b, N).values,
        "proctor": lambda: proctor_counts(b, N).values,
    }
    if args.method == "proctor" and not isinstance(b, Linear):
        raise UsageError("proctor requires linear barrier")
    if args.method != "all":
        return {"method": args.method, "f": ints(runners[args.method]())}, EXIT_OK
    methods = ["dp", "recurrence"] + (["proctor"] if isinstance(b, Linear) else [])
    table = {m: runners[m]() for m in methods}
    first = table[methods[0]]
    agree = all(table[m] == first for m in methods)
    out: dict[str, Any] = {
        "method": "all",
        "methods": {m: ints(v) for m, v in table.items()},
        "agreement": agree,
        "f": ints(first) if agree else None,
    }
    if not agree:
        n_bad = next(n for n in range(N + 1) if len({table[m][n] for m in methods}) > 1)
        out["first_disagreement"] = str(n_bad)
    return out, EXIT_OK if agree else EXIT_FAIL


def cmd_verify(args) -> tuple[dict, int]:
    b = parse_barrier_spec(args.barrier)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    res = gf_identity_residual(b, args.n)
    k = res.first_nonzero()
    gf = {
        "degree": str(args.n),
        "passed": k is None,
        "first_failure": None if k is None else {"degree": str(k), "coefficient": rat(res[k])},
    }
    rep = kernel_identity_check(b, args.window, args.window)
    first = rep.mismatches[0] if rep.mismatches else None
    kern = {
        "window": str(args.window),
        "checked": str(rep.checked),
        "passed": rep.passed,
        "first_failure": None if first is None else {
            "m": str(first[0]), "j": str(first[1]), "lhs": str(first[2]), "rhs": str(first[3]),
        },
    }
    passed = gf["passed"] and kern["passed"]
    return {"passed": passed, "gf_identity": gf, "kernel": kern}, EXIT_OK if passed else EXIT_FAIL


def cmd_det(args) -> tuple[dict, int]:
    upper = parse_int_list(args.upper)
    lower = parse_int_list(args.lower) if args.lower else [0] * len(upper)
    n = args.n if args.n is not None else len(upper) - 1
    try:
        oracle = two_barrier_dp(lower, upper, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    printed = kreweras_determinant(lower, upper, n, PRINTED_CONVENTION)
    report = resolve_determinant_convention(args.seed)
    out: dict[str, Any] = {
        "oracle": str(oracle),
        "printed": str(printed),
        "printed_matches_oracle": printed == oracle,
        "battery_size": str(report.battery_size),
        "failures": {name: str(c) for name, c in report.failures.items()},
    }
    if report.matched:
        value = kreweras_determinant(lower, upper, n, report.convention)
        out["resolved"] = {"convention": report.convention.name, "value": str(value),
                           "matches_oracle": value == oracle}
        status = EXIT_OK if value == oracle else EXIT_FAIL
    else:
        out["resolved"] = "NoMatch"
        status = EXIT_OK
    return out, status


def cmd_simulate(args) -> tuple[dict, int]:
    b = parse_barrier_spec(args.barrier)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    cfg = WalkConfig(b, parse_rational(args.p), args.seed, args.cap)
    ms, _, cens = run_trials(cfg, args.trials, workers=args.workers)
    stats = exit_stats_from_runs(cfg, ms, cens, args.m_max)
    esc = escape_from_runs(cfg, cens)
    bins = []
    for m in range(-1, args.m_max + 1):
        bins.append({
            "m": str(m),
            "count": str(stats.counts[m]),
            "expected_probability": rat(stats.expected[m]),
            "z_approx": f"{stats.z_scores[m]:.4f}",
        })
    return {
        "bins": bins,
        "overflow": str(stats.overflow),
        "censored": str(stats.censored),
        "escape": {
            "point_approx": f"{esc.point:.6g}",
            "ci95_approx": [f"{esc.low:.6g}", f"{esc.high:.6g}"],
            "note": esc.note,
        },
    }, EXIT_OK


def cmd_classify(args) -> tuple[dict, int]:
    b = parse_barrier_spec(args.barrier)
    p = parse_rational(args.p)
    cls = classify_equality(b, p)
    return {"classification": cls, "theta": str(b.growth_rate()), "q_over_p": rat((1 - p) / p)}, EXIT_OK


def cmd_weights(args) -> tuple[dict, int]:
    b = parse_barrier_spec(args.barrier)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    rep = truncated_weight_sum(b, parse_rational(args.p), args.n)
    out: dict[str, Any] = {
        "S_N": rat(rep.total),
        "S_N_approx": rep.total_approx,
        "at_most_one": rep.total <= 1,
        "classification": rep.classification,
        "theta": str(rep.theta),
        "q_over_p": rat(rep.q_over_p),
    }
    if args.partials:
        out["partial_sums"] = [rat(s) for s in rep.partial_sums]
    return out, EXIT_OK


COMMANDS = {
    "count": cmd_count,
    "verify": cmd_verify,
    "det": cmd_det,
    "simulate": cmd_simulate,
    "classify": cmd_classify,
    "weights": cmd_weights,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "tsv"], default="json")

    parser = argparse.ArgumentParser(prog="barrierpaths", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="f(0..N) by one or all methods")
    p.add_argument("--barrier", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=["dp", "recurrence", "proctor", "all"], default="all")

    p = sub.add_parser("verify", parents=[common], help="generating-function and kernel identities")
    p.add_argument("--barrier", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--window", type=int, default=40)

    p = sub.add_parser("det", parents=[common], help="binomial determinant vs two-barrier count")
    p.add_argument("--lower", default=None, help="comma-separated; default all zeros")
    p.add_argument("--upper", required=True, help="comma-separated")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=0, help="resolution battery seed")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo exit law")
    p.add_argument("--barrier", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=10**5)
    p.add_argument("--m-max", type=int, default=10)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("classify", parents=[common], help="equality trichotomy")
    p.add_argument("--barrier", required=True)
    p.add_argument("--p", required=True)

    p = sub.add_parser("weights", parents=[common], help="exact truncated weight sum")
    p.add_argument("--barrier", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--partials", action="store_true", help="emit every partial sum")
    return parser


def _inputs(args) -> dict[str, Any]:
    skip = {"command", "format"}
    return {k: (v if isinstance(v, (bool, type(None))) else str(v))
            for k, v in vars(args).items() if k not in skip}


def _flatten(prefix: str, value, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, "null" if value is None else str(value).lower()
                     if isinstance(value, bool) else str(value)))


def render(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, indent=2)
    rows: list[tuple[str, str]] = []
    _flatten("", record, rows)
    return "\n".join(f"{k}\t{v}" for k, v in rows)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    record: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "inputs": _inputs(args),
    }
    try:
        results, status = COMMANDS[args.command](args)
        record["results"] = results
    except (UsageError, BarrierSpecError, ValueError, TypeError) as exc:
        pos = getattr(exc, "position", None)
        record["error"] = {"type": type(exc).__name__, "message": str(exc),
                           "position": None if pos is None else str(pos)}
        status = EXIT_USAGE
    except (CellBudgetExceeded, InternalInconsistency, AmbiguousConvention) as exc:
        record["error"] = {"type": type(exc).__name__, "message": str(exc), "position": None}
        status = EXIT_FAIL
    print(render(record, args.format))
    return status


if __name__ == "__main__":
    sys.exit(main())
