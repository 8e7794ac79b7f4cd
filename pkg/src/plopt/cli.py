"""Command line entry point: ``plopt run`` and ``plopt table``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import (
    ALGORITHMS, FORMATS, ExperimentConfig, RunRecord, SummaryRow, emit_report, fmt_evals,
    load_campaign, render_report, run_campaign, run_experiment, summarize, write_records,
)
from .ledger import DEFAULT_BUDGET
from .problems import PROBLEMS

CONFIG_ERROR = 2
IO_ERROR = 1


def read_seeds(path: str) -> tuple[int, ...]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read seeds file {path}: {exc.strerror or exc}") from None
    try:
        return tuple(int(tok) for tok in text.replace(",", " ").split())
    except ValueError:
        raise ValueError(f"seeds file {path} must contain integers only") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one algorithm on one problem for several seeds")
    run.add_argument("--problem", required=True, help=f"one of: {', '.join(PROBLEMS)}")
    run.add_argument("--algorithm", required=True, help=f"one of: {', '.join(ALGORITHMS)}")
    run.add_argument("--runs", type=int, default=None, help="number of runs (default 20)")
    run.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    seeds = run.add_mutually_exclusive_group()
    seeds.add_argument("--seed", type=int, default=0, help="base seed; run i uses seed+i")
    seeds.add_argument("--seeds", metavar="FILE", help="file with one seed per run")
    run.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    run.add_argument("--records", metavar="FILE", help="also write one CSV line per run")
    _output_args(run)

    table = sub.add_parser("table", help="run a problem x algorithm campaign")
    table.add_argument("--campaign", required=True, metavar="FILE", help="JSON or key=value config")
    table.add_argument("--out", help="report path (overrides the campaign file)")
    table.add_argument("--format", choices=FORMATS, help="report format (overrides the campaign file)")
    table.add_argument("--trace", action="store_true", help="log optimiser progress to stderr")
    return parser


def _output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write the summary report here instead of stdout")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--trace", action="store_true", help="log optimiser progress to stderr")


def _print_record(r: RunRecord) -> None:
    status = f"hit at {r.evaluations_to_target}" if r.success else f"failed ({r.evaluations_used} evals)"
    by = f" by {r.attribution}" if r.attribution and r.algorithm == "ils+ecga" else ""
    print(f"seed {r.seed}: {status}{by}, best {r.best_objective:.6g}, {r.wall_time:.2f}s",
          file=sys.stderr)


def _print_row(row: SummaryRow) -> None:
    split = f" ({row.attribution})" if row.attribution else ""
    print(f"{row.problem:18s} {row.algorithm:9s} mean {fmt_evals(row.mean_evals):>11s} "
          f"std {fmt_evals(row.std_evals):>11s} R_ts {row.r_ts}{split}", file=sys.stderr)


def _deliver(rows: list[SummaryRow], fmt: str, out: str | None) -> int:
    if out is None:
        sys.stdout.write(render_report(rows, fmt))
        return 0
    try:
        emit_report(rows, fmt, out)
    except OSError as exc:
        print(f"plopt: {exc}", file=sys.stderr)
        return IO_ERROR
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if not args.trace:
        return _main(args)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s %(message)s"))
    logger = logging.getLogger("plopt")
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG)
    try:
        return _main(args)
    finally:
        logger.removeHandler(handler)
        logger.setLevel(logging.NOTSET)


def _main(args: argparse.Namespace) -> int:
    try:
        if args.command == "run":
            seeds = read_seeds(args.seeds) if args.seeds else None
            runs = args.runs if args.runs is not None else (len(seeds) if seeds else 20)
            config = ExperimentConfig(args.problem, args.algorithm, runs, args.budget, args.seed,
                                      seeds, args.out, args.format, args.workers)
            config.validate()
        else:
            campaign = load_campaign(args.campaign)
            campaign.experiments()
    except (ValueError, OSError) as exc:
        print(f"plopt: {exc}", file=sys.stderr)
        return CONFIG_ERROR

    if args.command == "run":
        records = run_experiment(config)
        for r in records:
            _print_record(r)
        row = summarize(records, config.problem, config.algorithm)
        _print_row(row)
        if args.records:
            try:
                write_records(records, args.records)
            except OSError as exc:
                print(f"plopt: {exc}", file=sys.stderr)
                return IO_ERROR
        return _deliver([row], config.format, config.out)

    rows = run_campaign(campaign, progress=_print_row)
    return _deliver(rows, args.format or campaign.format, args.out or campaign.out)


if __name__ == "__main__":
    sys.exit(main())
