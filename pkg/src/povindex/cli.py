"""Command-line surface: point estimation with intervals, and grid simulation.

Exit codes: 0 success, 2 input-data error, 3 inference error, 4 config error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .core import gini_among_poor, income_gap_ratio, poor_partition
from .el import el_confidence_interval
from .errors import ConfigError, DataError, InferenceError, PovindexError
from .estimators import (
    ESTIMATORS,
    normal_ci,
    sen_asymptotic_variance,
    sen_davidson,
    sst_asymptotic_variance,
    sst_davidson,
)
from .errors import DegenerateSubsample, NoPoorObservations
from .io import (
    AnalysisConfig,
    AnalysisReport,
    EstimateEntry,
    IndexBlock,
    IntervalEntry,
    ingest_csv,
    parse_simulation_config,
    simulation_reports_to_csv,
    simulation_reports_to_json,
    utc_timestamp,
)
from .jel import jel_confidence_interval
from .simulation import run_ci_grid, run_estimator_grid


def cmd_estimate(config: AnalysisConfig) -> AnalysisReport:
    """Run the configured estimators and intervals over one CSV column."""
    sample, summary = ingest_csv(config.input_path, config.column, config.delimiter)
    z = config.poverty_line
    partition = poor_partition(sample, z)
    try:
        gap = income_gap_ratio(partition, z)
    except NoPoorObservations:
        gap = None
    try:
        gini = gini_among_poor(sample, z)
    except (NoPoorObservations, DegenerateSubsample):
        gini = None

    blocks = []
    for index in config.indices():
        estimates = tuple(
            EstimateEntry(method=m, value=est.value, no_poor=est.no_poor)
            for m in config.methods()
            for est in [ESTIMATORS[(index, m)](sample, z)]
        )
        intervals = []
        for ci_method in config.ci_methods():
            if ci_method == "el":
                ci = el_confidence_interval(sample, z, index, config.alpha)
            elif ci_method == "jel":
                ci = jel_confidence_interval(sample, z, index, config.alpha)
            else:
                if index == "sen":
                    point = sen_davidson(sample, z)
                    var = sen_asymptotic_variance(sample, z)
                else:
                    point = sst_davidson(sample, z)
                    var = sst_asymptotic_variance(sample, z)
                ci = normal_ci(point, var, config.alpha)
            diag = ci.diagnostics
            intervals.append(IntervalEntry(
                method=ci_method,
                lower=ci.lower,
                upper=ci.upper,
                level=ci.level,
                estimate=ci.estimate,
                ratio_evaluations=diag.ratio_evaluations if diag else None,
                bracket_expansions=diag.bracket_expansions if diag else None,
                infeasible_endpoints=diag.infeasible_endpoints if diag else None,
            ))
        blocks.append(IndexBlock(
            index=index,
            q=partition.q,
            headcount=partition.headcount,
            income_gap_ratio=gap,
            gini_among_poor=gini,
            estimates=estimates,
            intervals=tuple(intervals),
        ))
    return AnalysisReport(
        input_path=config.input_path,
        column=config.column,
        poverty_line=z,
        alpha=config.alpha,
        n=sample.n,
        rows=summary,
        blocks=tuple(blocks),
        timestamp=utc_timestamp() if config.include_timestamp else None,
    )


def cmd_simulate(
    config_source: str,
    output_dir: str,
    reps: int | None = None,
    seed: int | None = None,
    z: float | None = None,
    fmt: str = "both",
    echo=print,
) -> list[str]:
    """Run the configured grids and write estimate/interval reports; returns paths."""
    setup = parse_simulation_config(config_source)
    mc = setup.config
    overrides = {}
    if reps is not None:
        overrides["reps"] = reps
    if seed is not None:
        overrides["seed"] = seed
    if z is not None:
        overrides["z"] = z
    if overrides:
        from dataclasses import replace

        mc = replace(mc, **overrides)

    os.makedirs(output_dir, exist_ok=True)
    written = []

    def emit(name: str, reports):
        if fmt in ("csv", "both"):
            path = os.path.join(output_dir, f"{name}.csv")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(simulation_reports_to_csv(reports))
            written.append(path)
        if fmt in ("json", "both"):
            path = os.path.join(output_dir, f"{name}.json")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(simulation_reports_to_json(reports))
            written.append(path)
        for r in reports:
            echo(
                f"{r.dist} {r.params} n={r.n} {r.index}:{r.method} "
                + (f"bias={r.bias:.6f} mse={r.mse:.6f}" if r.kind == "estimate"
                   else f"coverage={r.coverage:.4f} length={r.avg_length:.4f} failures={r.failures}")
                + f" mc_se={r.mc_se:.6f}"
            )

    if mc.estimators:
        emit("estimates", run_estimator_grid(mc, setup.dists))
    if mc.intervals:
        emit("intervals", run_ci_grid(mc, setup.dists))
    if not written:
        raise ConfigError("config requests neither estimators nor intervals")
    return written


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse usage errors are config errors (exit 4)
        raise ConfigError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="povindex", description="Poverty index estimation and likelihood-based intervals")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate indices from a CSV income column")
    est.add_argument("--input", required=True, help="CSV file with a header row")
    est.add_argument("--column", required=True, help="column name, or 0-based position")
    est.add_argument("--poverty-line", required=True, type=float, help="poverty line (same units as incomes)")
    est.add_argument("--index", default="both", choices=["sen", "sst", "both"])
    est.add_argument("--method", default="all", choices=["ustat", "plugin", "davidson", "all"])
    est.add_argument("--ci", default="none", choices=["el", "jel", "normal", "all", "none"])
    est.add_argument("--alpha", default=0.05, type=float)
    est.add_argument("--format", default="text", choices=["text", "json", "csv"])
    est.add_argument("--delimiter", default=",")
    est.add_argument("--output", default="-", help="output file, '-' for stdout")
    est.add_argument("--no-timestamp", action="store_true", help="omit the timestamp for byte-stable output")

    sim = sub.add_parser("simulate", help="run a Monte Carlo grid from a config file")
    sim.add_argument("--config", required=True, help="config path or bundled name (e.g. paper_tables)")
    sim.add_argument("--output-dir", default="simulation_out")
    sim.add_argument("--reps", type=int, default=None, help="override replication count")
    sim.add_argument("--seed", type=int, default=None, help="override RNG seed")
    sim.add_argument("--z", type=float, default=None, help="override the poverty line")
    sim.add_argument("--format", default="both", choices=["csv", "json", "both"])
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "estimate":
            config = AnalysisConfig(
                input_path=args.input,
                column=args.column,
                poverty_line=args.poverty_line,
                index=args.index,
                method=args.method,
                ci=args.ci,
                alpha=args.alpha,
                output_format=args.format,
                delimiter=args.delimiter,
                include_timestamp=not args.no_timestamp,
            )
            report = cmd_estimate(config)
            if args.format == "json":
                rendered = report.to_json() + "\n"
            elif args.format == "csv":
                rendered = report.to_csv()
            else:
                rendered = report.to_text()
            if args.output == "-":
                sys.stdout.write(rendered)
            else:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(rendered)
            return 0
        if args.command == "simulate":
            written = cmd_simulate(
                args.config,
                args.output_dir,
                reps=args.reps,
                seed=args.seed,
                z=args.z,
                fmt=args.format,
            )
            for path in written:
                print(f"wrote {path}")
            return 0
        raise ConfigError(f"unknown command {args.command!r}")
    except DataError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except InferenceError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 4
    except PovindexError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error [IO_ERROR]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
