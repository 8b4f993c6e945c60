"""``record-laws`` command line.

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 numeric or
domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .distributions import parse_descriptor
from .errors import DomainError, NumericError, StatisticsError, TableFormatError
from .interleaving import enumerate_interleavings, evaluate_general_density, is_experimental, term_dump
from .joint_density import closed_form_density
from .point import JointPoint
from .report import Check, VerificationReport, format_value
from . import verification as V

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2 or not all(p.strip() in ("2", "3") for p in parts):
        raise UsageError(f"pair must be 'p,q' with p, q in {{2,3}}, got {text!r}")
    return int(parts[0]), int(parts[1])


def _model(text: str):
    try:
        return parse_descriptor(text)
    except TableFormatError as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _new_report(argv, model, seed) -> VerificationReport:
    return VerificationReport(tool_version=__version__, command=list(argv), model=model, seed=seed)


def _finish(report: VerificationReport, out: str | None) -> int:
    if out:
        report.write(out)
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.check_id} {json.dumps(c.inputs, default=str)}")
    print(f"overall: {'PASS' if report.passed else 'FAIL'} ({sum(c.passed for c in report.checks)}/{len(report.checks)})")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_density(args, argv) -> int:
    d = _model(args.dist)
    values = _floats(args.point)
    if len(values) != 2 * args.n - 1:
        raise UsageError(f"--n {args.n} needs {2 * args.n - 1} coordinates, got {len(values)}")
    point = JointPoint.from_flat(values, args.n)
    if args.method == "closed":
        if args.n > 3:
            raise UsageError("closed form only for n <= 3; use --method generated")
        value = closed_form_density(d, point)
    else:
        value = evaluate_general_density(d, point, args.n)
    print(format_value(value))
    experimental = args.method == "generated" and is_experimental(args.n)
    if experimental:
        print("note: experimental (terms for n >= 4 extrapolate the n <= 3 pattern)", file=sys.stderr)
    if args.out:
        report = _new_report(argv, d.descriptor, None)
        report.extra.update({"n": args.n, "point": values, "method": args.method, "value": value,
                             "experimental": experimental})
        report.write(args.out)
    return EXIT_OK


def cmd_verify(args, argv) -> int:
    d = _model(args.dist)
    report = _new_report(argv, d.descriptor, args.seed)
    suite = args.suite
    pairs = [_pair(p) for p in args.pairs] if args.pairs else None
    try:
        if suite == "normalization":
            checks = V.suite_normalization(d, args.tol)
        elif suite == "marginals":
            checks = V.suite_marginals(d, pairs or V.PAIRS, points=args.points or 20, seed=args.seed, tol=args.tol)
        elif suite == "generator":
            checks = V.suite_generator(d, n=args.n, points=args.points or 1000, seed=args.seed,
                                       tol=args.tol if args.tol is not None else 1e-12,
                                       horizon=args.horizon or 400)
            report.extra["experimental"] = is_experimental(args.n)
        elif suite == "oracle":
            if d.kind != "discrete":
                raise UsageError("verify oracle needs a discrete model (duniform:m or table:path)")
            checks = V.suite_oracle(d, n=args.n, horizon=args.horizon)
            report.extra["experimental"] = is_experimental(args.n)
        else:
            checks, summary = V.suite_mc(d, n=args.n, runs=args.runs, seed=args.seed, max_draws=args.max_draws,
                                         bins=args.bins, pairs=pairs or [(2, 2)], workers=args.workers)
            report.extra["summary"] = summary.to_json()
    except (NumericError, StatisticsError) as exc:
        report.add(Check(f"{suite}.error", {}, None, str(exc), None, False))
        _finish(report, args.out)
        return EXIT_NUMERIC
    for c in checks:
        report.add(c)
    return _finish(report, args.out)


def cmd_simulate(args, argv) -> int:
    from .simulation import compare_to_closed_form, run_batch

    d = _model(args.dist)
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    if args.max_draws < 2 * args.records - 1:
        raise UsageError(f"--max-draws must be at least {2 * args.records - 1}")
    summary = run_batch(d, args.records, args.runs, args.seed, max_draws=args.max_draws, bins=args.bins,
                        workers=args.workers, export=args.export)
    report = _new_report(argv, d.descriptor, args.seed)
    report.extra["summary"] = summary.to_json()
    print(f"runs: {summary.runs}")
    print(f"completed: {summary.completed}")
    print(f"censored_fraction: {format_value(summary.censored_fraction)}")
    for tag, count in summary.ordering_counts.items():
        print(f"ordering {tag}: {count}")
    for text in args.fit or []:
        pair = _pair(text)
        try:
            fit = compare_to_closed_form(summary, d, pair)
        except StatisticsError as exc:
            report.add(Check(f"fit_{pair[0]}{pair[1]}", {"pair": list(pair)}, "p_value > 0.01", str(exc), 0.01, False))
            continue
        report.add(Check(f"fit_{pair[0]}{pair[1]}", fit.to_json(), "p_value > 0.01", fit.p_value, 0.01, fit.p_value > 0.01))
        print(f"fit {pair[0]},{pair[1]}: chi2={format_value(fit.statistic)} dof={fit.dof} p={format_value(fit.p_value)}")
    if args.out:
        report.write(args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_orderings(args, argv) -> int:
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    if args.emit_terms:
        print(json.dumps(term_dump(args.n, args.kind), indent=2))
        return EXIT_OK
    inters = enumerate_interleavings(args.n)
    print(f"count: {len(inters)}")
    for inter in inters:
        label = inter.label
        print(f"{label} {inter.tag}" if label else inter.tag)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="record-laws", description="Joint lower/upper record value laws.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="evaluate the joint density (or mass) of Z_n")
    p.add_argument("--dist", required=True, help="model descriptor, e.g. exp:1, uniform:0,1, table:path.csv")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--point", required=True, help="x,y1..y_{n-1},z1..z_{n-1}")
    p.add_argument("--method", choices=("closed", "generated"), default="closed")
    p.add_argument("--out")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("verify", help="run a verification suite and write a report")
    p.add_argument("suite", choices=("normalization", "marginals", "generator", "oracle", "mc"))
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--pairs", nargs="+", help="pairs such as 2,2 3,3")
    p.add_argument("--points", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--runs", type=int, default=1_000_000)
    p.add_argument("--max-draws", type=int, default=100_000)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="simulate record processes")
    p.add_argument("--dist", required=True)
    p.add_argument("--records", type=int, default=3)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-draws", type=int, default=100_000)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--workers", type=int)
    p.add_argument("--export", help="write completed traces as CSV")
    p.add_argument("--fit", nargs="+", help="pairs p,q to compare against the closed form")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("orderings", help="list record-time interleavings")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--emit-terms", action="store_true")
    p.add_argument("--kind", choices=("continuous", "discrete"), default="continuous")
    p.set_defaults(func=cmd_orderings)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, NumericError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
