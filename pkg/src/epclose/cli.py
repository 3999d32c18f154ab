"""Command-line entry point: ``epclose {mine,bench,eval,gen,discretize}``.

Exit codes: 0 success, 1 input or validation error, 2 bad arguments,
3 the two miners disagreed during ``bench``.  The log level comes from the
``EPCLOSE_LOG_LEVEL`` environment variable (default ``WARNING``).
"""

from __future__ import annotations

import argparse
import logging
import os
import statistics
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

from ._validation import as_fraction, check_min_growth_rate, check_min_support
from .baseline import compare_outputs, extcp_baseline
from .engine import BACKENDS, mine_ccps, warm_up
from .evaluate import DEFAULT_NEAR_PURE, purity_summary
from .exceptions import EPCloseError
from .ingest import (
    SchemaConfig,
    encode_table,
    fit_bins,
    load_pair,
    read_baskets,
    read_table,
    write_dump,
)
from .io import FORMATS, build_manifest, read_ccps, write_ccps, write_json
from .model import CCP, DualCount, Origin, Transaction, format_fraction
from .synth import generate_pair

logger = logging.getLogger("epclose")

EXIT_OK, EXIT_INPUT, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3


class CommandError(Exception):
    """An error that should end the command with a given exit code."""

    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _fraction_arg(check):
    def parse(text):
        try:
            return check(text)
        except (ValueError, TypeError) as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def _support_list(text):
    try:
        return [check_min_support(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _add_inputs(p, required=True):
    p.add_argument("--background", required=required, metavar="FILE",
                   help="background dataset file")
    p.add_argument("--target", required=required, metavar="FILE", help="target dataset file")
    p.add_argument("--schema", metavar="FILE",
                   help="column schema for delimited input (see epclose.ingest)")
    p.add_argument("--input-format", choices=("auto", "csv", "basket"), default="auto",
                   help="csv needs a schema (default: csv when --schema is given, else basket)")


def _add_thresholds(p, support_required=True):
    p.add_argument("--min-support", required=support_required, metavar="FRAC",
                   type=_fraction_arg(check_min_support),
                   help="minimum target support, e.g. 0.4, 2/5 or 0.5%%")
    p.add_argument("--min-growth-rate", required=True, metavar="RAT",
                   type=_fraction_arg(check_min_growth_rate),
                   help="minimum growth rate, greater than 1")
    p.add_argument("--backend", choices=BACKENDS, default="auto",
                   help="search implementation (default: auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epclose", description="Mine closed contrast patterns between two datasets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="mine CCPs from a background/target pair")
    _add_inputs(p)
    _add_thresholds(p)
    p.add_argument("--output", metavar="FILE", help="CCP output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--manifest", metavar="FILE",
                   help="run manifest (default: OUTPUT.manifest.json when --output is given)")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("bench", help="time the miner against the mine-then-match baseline")
    _add_inputs(p)
    _add_thresholds(p, support_required=False)
    p.add_argument("--runs", type=_positive_int, default=3,
                   help="timed runs per algorithm; the median is reported (default: 3)")
    p.add_argument("--support-sweep", type=_support_list, metavar="A,B,...",
                   help="comma-separated supports to time (default: --min-support)")
    p.add_argument("--background-min-count", type=_positive_int, metavar="N",
                   help="baseline background threshold (default: min-support times n_b)")
    p.add_argument("--report", metavar="FILE", help="write the timings as JSON")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("eval", help="attack ratio and purity of mined CCPs")
    p.add_argument("--ccps", required=True, metavar="FILE", help="CCP file from `mine` (csv or jsonl)")
    p.add_argument("--target", required=True, metavar="FILE", help="labeled target dataset")
    p.add_argument("--label-column", metavar="NAME", help="label column of delimited input")
    p.add_argument("--attack-values", metavar="V1,V2",
                   help="label values meaning attack (delimited input)")
    p.add_argument("--schema", metavar="FILE")
    p.add_argument("--background", metavar="FILE",
                   help="background file, needed to refit continuous bins as mined")
    p.add_argument("--input-format", choices=("auto", "csv", "basket"), default="auto")
    p.add_argument("--near-pure", type=_fraction_arg(as_fraction), default=DEFAULT_NEAR_PURE,
                   metavar="FRAC", help="threshold for the separate near-pure count (default 0.95)")
    p.add_argument("--output", metavar="FILE", help="per-CCP records as jsonl")
    p.add_argument("--summary", metavar="FILE", help="summary as JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", help="write a seeded synthetic background/target pair")
    p.add_argument("--items", type=_positive_int, required=True)
    p.add_argument("--rows-b", type=_positive_int, required=True)
    p.add_argument("--rows-t", type=_positive_int, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--drift", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--duplicate-rate", type=float, default=0.0)
    p.add_argument("--drift-fraction", type=float, default=0.1,
                   help="share of items whose target probability drifts (default 0.1)")
    p.add_argument("--out-background", required=True, metavar="FILE")
    p.add_argument("--out-target", required=True, metavar="FILE")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("discretize", help="dump encoded transactions, one per line")
    _add_inputs(p)
    p.add_argument("--output", metavar="FILE", help="default: stdout")
    p.set_defaults(func=cmd_discretize)
    return parser


def _load(args):
    schema = SchemaConfig.from_file(args.schema) if args.schema else None
    if args.input_format == "csv" and schema is None:
        schema = SchemaConfig()
    return load_pair(args.background, args.target, schema, args.input_format), schema


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def cmd_mine(args) -> int:
    pair, schema = _load(args)
    start = time.perf_counter()
    ccps = mine_ccps(pair, args.min_support, args.min_growth_rate, args.backend)
    elapsed = time.perf_counter() - start
    with _output(args.output) as fh:
        write_ccps(ccps, pair.symbols, pair.n_b, pair.n_t, fh, args.format)
    manifest_path = args.manifest or (f"{args.output}.manifest.json" if args.output else None)
    if manifest_path:
        manifest = build_manifest(
            {"background": args.background, "target": args.target, "schema": args.schema},
            sigma=args.min_support, rho=args.min_growth_rate, output=args.output,
            schema=schema.describe() if schema else None, duration_s=elapsed,
            extra={"format": args.format, "n_b": pair.n_b, "n_t": pair.n_t,
                   "n_ccps": len(ccps)})
        write_json(manifest, manifest_path)
    print(f"{len(ccps)} CCPs from n_b={pair.n_b}, n_t={pair.n_t} "
          f"(min support {args.min_support}, min growth rate {args.min_growth_rate}) "
          f"in {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK


def time_interleaved(first, second, runs):
    """Median wall time of two callables, run alternately so that a slow
    stretch of the machine affects both alike.

    Returns ``(median_first, times_first, result_first, median_second,
    times_second, result_second)``.
    """
    times = ([], [])
    results = [None, None]
    for _ in range(runs):
        for k, fn in enumerate((first, second)):
            start = time.perf_counter()
            results[k] = fn()
            times[k].append(time.perf_counter() - start)
    return (statistics.median(times[0]), times[0], results[0],
            statistics.median(times[1]), times[1], results[1])


def cmd_bench(args) -> int:
    supports = args.support_sweep or ([args.min_support] if args.min_support else None)
    if not supports:
        raise CommandError("give --min-support or --support-sweep", EXIT_USAGE)
    pair, _ = _load(args)
    rho = args.min_growth_rate
    warm_up(args.backend)
    rows = []
    print(f"{'support':>10} {'epclose_s':>10} {'baseline_s':>11} {'speedup':>8} {'ccps':>8}")
    for sigma in supports:
        t_e, runs_e, ours, t_b, runs_b, theirs = time_interleaved(
            lambda: mine_ccps(pair, sigma, rho, args.backend),
            lambda: extcp_baseline(pair, sigma, rho, args.background_min_count, args.backend),
            args.runs)
        if args.inject_fault:
            ours = list(ours) + [CCP((0,), DualCount(0, 0), Fraction(0))]
        report = compare_outputs(theirs, ours)
        if not report.match:
            print(f"output mismatch at support {sigma}:\n{report.describe(pair.symbols)}",
                  file=sys.stderr)
            return EXIT_MISMATCH
        speedup = t_b / t_e if t_e > 0 else float("inf")
        rows.append({"support": str(sigma), "epclose_median_s": t_e, "baseline_median_s": t_b,
                     "epclose_runs_s": runs_e, "baseline_runs_s": runs_b,
                     "speedup": speedup, "n_ccps": len(ours)})
        print(f"{format_fraction(sigma):>10} {t_e:>10.3f} {t_b:>11.3f} {speedup:>8.2f} "
              f"{len(ours):>8}", flush=True)
    policy = (f"baseline background threshold: "
              f"{args.background_min_count or 'min-support x n_b'} occurrences")
    print(policy, file=sys.stderr)
    if args.report:
        write_json({"min_growth_rate": str(rho), "runs": args.runs, "n_b": pair.n_b,
                    "n_t": pair.n_t, "baseline_background_policy": policy,
                    "backend": args.backend, "results": rows}, args.report)
    return EXIT_OK


def _labeled_target(args):
    """Target transactions with labels, keyed by item display strings."""
    fmt = args.input_format
    if fmt == "auto":
        fmt = "csv" if args.schema or args.label_column else "basket"
    if fmt == "basket":
        rows = read_baskets(args.target)
        labels = rows.labels or [None] * len(rows.items)
        return rows.items, labels
    if not args.label_column or not args.attack_values:
        raise CommandError("delimited input needs --label-column and --attack-values", EXIT_USAGE)
    schema = SchemaConfig.from_file(args.schema) if args.schema else SchemaConfig()
    schema = schema.with_label(args.label_column, args.attack_values.split(","))
    target = read_table(args.target, schema)
    if args.label_column not in target.names and args.label_column not in {
            str(i) for i in range(len(target.names))}:
        raise CommandError(f"{args.target}: no column named {args.label_column!r}")
    directives = schema.resolve(target.names)
    tables = [target]
    if any(d.kind == "continuous" for d in directives):
        if not args.background:
            raise CommandError("continuous columns need --background to refit the mined bins",
                               EXIT_USAGE)
        background = read_table(args.background, schema)
        if background.names != target.names:
            raise CommandError(f"{args.background} and {args.target} have different columns")
        tables = [background, target]
    encoded = encode_table(target, directives, fit_bins(tables, directives))
    return encoded.items, encoded.labels


def cmd_eval(args) -> int:
    records = read_ccps(args.ccps)
    items, labels = _labeled_target(args)
    ids: dict = {}
    for row in items:
        for s in row:
            ids.setdefault(s, len(ids))
    for pattern, _, _ in records:
        for s in pattern:
            ids.setdefault(s, len(ids))  # unknown items match no transaction
    symbols = sorted(ids, key=ids.get)
    target = [Transaction(tuple(sorted({ids[s] for s in row})), Origin.TARGET, label)
              for row, label in zip(items, labels)]
    ccps = [CCP(tuple(sorted(ids[s] for s in pattern)), counts, gr)
            for pattern, counts, gr in records]
    report = purity_summary(ccps, target, args.near_pure)
    sys.stdout.write(report.to_table(symbols))
    if args.output:
        Path(args.output).write_text(report.to_jsonl(symbols), encoding="utf-8")
    if args.summary:
        write_json(report.summary(), args.summary)
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        data = generate_pair(args.items, args.rows_b, args.rows_t, args.density, args.drift,
                             args.seed, args.duplicate_rate, args.drift_fraction)
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_USAGE) from None
    for path, rows in ((args.out_background, data.background), (args.out_target, data.target)):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(" ".join(r) + "\n" for r in rows)
    print(f"wrote {len(data.background)} + {len(data.target)} rows; drifted items: "
          f"{' '.join(data.drifted) or '-'}", file=sys.stderr)
    return EXIT_OK


def cmd_discretize(args) -> int:
    pair, _ = _load(args)
    with _output(args.output) as fh:
        write_dump(pair, fh)
    return EXIT_OK


def _configure_logging():
    level = os.environ.get("EPCLOSE_LOG_LEVEL", "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        level = "WARNING"
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors (2) and --help (0)
        return exc.code
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"epclose {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except (EPCloseError, OSError) as exc:
        print(f"epclose {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
