"""Batch command line: ``compute``, ``summarize``, ``rank``, ``export-plot``.

Jobs come from repeated ``--chain``/``--meta`` pairs or from a JSON manifest::

    {"jobs": [{"chain": "aapl.csv", "meta": "aapl.meta", "ticker": "AAPL"}],
     "days_per_year": 252, "policy": "mean", "t_bins": 40, "m_bins": 40,
     "out": "results", "format": "csv"}

Manifest paths are relative to the manifest file.  Flags override manifest
values; jobs given on the command line replace the manifest's job list.
A failed job is reported and the others still run; the exit status is 0
only if every job succeeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

from .core import DayCountConfig
from .export import (
    atomic_write,
    failures_text,
    gnuplot_script,
    grid_text,
    points_text,
    rank_text,
    safe_name,
    summary_text,
)
from .ingest import IngestError, SnapshotError, assemble_snapshot, load_metadata, parse_chain_file
from .ranking import RankPolicy, rank
from .surface import CerSurface, EmptySurfaceError, RateSummary, build_surface, grid_surface, summarize

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_JOB_FAILED = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class Job:
    chain: Path
    meta: Path
    ticker: str | None = None


@dataclass
class RunConfig:
    jobs: list[Job]
    days_per_year: int = 252
    policy: RankPolicy = RankPolicy.MEAN
    t_bins: int = 40
    m_bins: int = 40
    output_dir: Path = Path(".")
    output_format: str = "csv"

    def __post_init__(self):
        if not self.jobs:
            raise ValueError("no jobs: give --chain/--meta pairs or a manifest")
        if self.t_bins < 2 or self.m_bins < 2:
            raise ValueError("--t-bins and --m-bins must be at least 2")
        if self.days_per_year <= 0:
            raise ValueError("--days-per-year must be positive")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        self.policy = RankPolicy.parse(self.policy)
        self.output_dir = Path(self.output_dir)

    @property
    def day_count(self) -> DayCountConfig:
        return DayCountConfig(days_per_year=self.days_per_year)


@dataclass
class JobResult:
    label: str
    surface: CerSurface | None = None
    error: str | None = None
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.surface is not None


def run_job(job: Job, config: RunConfig) -> JobResult:
    label = job.ticker or job.meta.stem
    failures: list[dict] = []
    try:
        meta = load_metadata(job.meta)
        label = job.ticker or meta["ticker"]
        quotes, report = parse_chain_file(job.chain)
        failures += [
            {"ticker": label, "stage": "ingest", "row": row, "reason": reason}
            for row, reason in report.rejection_reasons
        ]
        snapshot = assemble_snapshot(meta, quotes, report)
    except (IngestError, SnapshotError, OSError) as exc:
        failures.append({"ticker": label, "stage": "job", "reason": str(exc)})
        return JobResult(label, error=str(exc), failures=failures)
    failures += [
        {"ticker": label, "stage": "ingest", "row": row, "reason": reason}
        for row, reason in snapshot.report.rejection_reasons[report.rejected:]
    ]
    try:
        surface = build_surface(snapshot, config.day_count)
    except EmptySurfaceError as exc:
        failures.append({"ticker": label, "stage": "job", "reason": str(exc)})
        return JobResult(label, error=str(exc), failures=failures)
    failures += [
        {"ticker": label, "stage": "rate", "expiry": f.expiry.isoformat(), "strike": f.strike, "reason": f.reason}
        for f in surface.failures
    ]
    return JobResult(label, surface=surface, failures=failures)


def run_jobs(config: RunConfig) -> list[JobResult]:
    results = []
    seen = set()
    for job in config.jobs:
        result = run_job(job, config)
        if result.label in seen:
            reason = f"duplicate ticker {result.label}"
            result = JobResult(result.label, error=reason, failures=[{"ticker": result.label, "stage": "job", "reason": reason}])
        seen.add(result.label)
        if result.error:
            logger.error("%s: %s", result.label, result.error)
        results.append(result)
    return results


def _exit_status(results: Sequence[JobResult]) -> int:
    return EXIT_OK if all(r.ok for r in results) else EXIT_JOB_FAILED


def _write_failures(config: RunConfig, results: Sequence[JobResult]) -> None:
    rows = [f for r in results for f in r.failures]
    atomic_write(config.output_dir / f"failures.{config.output_format}", failures_text(rows, config.output_format))


def cmd_compute(config: RunConfig) -> int:
    """Write ``<ticker>_points`` and ``<ticker>_grid`` per job plus a failure report."""
    results = run_jobs(config)
    fmt = config.output_format
    for result in results:
        if not result.ok:
            continue
        name = safe_name(result.label)
        grid = grid_surface(result.surface, config.t_bins, config.m_bins)
        atomic_write(config.output_dir / f"{name}_points.{fmt}", points_text(result.surface, fmt))
        atomic_write(config.output_dir / f"{name}_grid.{fmt}", grid_text(grid, fmt))
    _write_failures(config, results)
    return _exit_status(results)


def _summaries(results: Sequence[JobResult]) -> list[tuple[str, RateSummary | str]]:
    return [(r.label, summarize(r.surface) if r.ok else r.error) for r in results]


def cmd_summarize(config: RunConfig, stream: TextIO | None = None) -> int:
    results = run_jobs(config)
    rows = _summaries(results)
    atomic_write(config.output_dir / f"summary.{config.output_format}", summary_text(rows, config.output_format))
    (stream or sys.stdout).write(summary_text(rows))
    return _exit_status(results)


def cmd_rank(config: RunConfig, stream: TextIO | None = None) -> int:
    results = run_jobs(config)
    ranked = [(t, s) for t, s in _summaries(results) if isinstance(s, RateSummary)]
    if not ranked:
        logger.error("no ticker could be summarized")
        return EXIT_JOB_FAILED
    report = rank(ranked, config.policy)
    atomic_write(config.output_dir / f"rank.{config.output_format}", rank_text(report, config.output_format))
    (stream or sys.stdout).write(rank_text(report))
    return _exit_status(results)


def cmd_export_plot(config: RunConfig) -> int:
    """Write ``<ticker>_grid.csv`` and a gnuplot script ``<ticker>.gp`` per job.

    Grids are always CSV here, whatever the output format, because gnuplot
    reads them directly.
    """
    results = run_jobs(config)
    for result in results:
        if not result.ok:
            continue
        name = safe_name(result.label)
        grid = grid_surface(result.surface, config.t_bins, config.m_bins)
        grid_path = atomic_write(config.output_dir / f"{name}_grid.csv", grid_text(grid, "csv"))
        atomic_write(config.output_dir / f"{name}.gp", gnuplot_script(result.label, grid_path))
    _write_failures(config, results)
    return _exit_status(results)


COMMANDS = {
    "compute": cmd_compute,
    "summarize": cmd_summarize,
    "rank": cmd_rank,
    "export-plot": cmd_export_plot,
}


def load_manifest(path) -> dict:
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError("manifest must be a JSON object")
    base = path.parent
    jobs = []
    for item in data.get("jobs", []):
        jobs.append(Job(base / item["chain"], base / item["meta"], item.get("ticker")))
    out = {"jobs": jobs}
    for key, attr in [
        ("days_per_year", "days_per_year"),
        ("policy", "policy"),
        ("t_bins", "t_bins"),
        ("m_bins", "m_bins"),
        ("format", "output_format"),
    ]:
        if key in data:
            out[attr] = data[key]
    if "out" in data:
        out["output_dir"] = base / data["out"]
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", type=Path, help="JSON manifest of jobs and options")
    common.add_argument("--chain", type=Path, action="append", default=[], help="chain file (csv or json); pair with --meta")
    common.add_argument("--meta", type=Path, action="append", default=[], help="metadata file for the preceding --chain")
    common.add_argument("--days-per-year", type=int, help="business days per year (default 252)")
    common.add_argument("--policy", choices=["mean", "min", "max"], help="rank statistic (default mean)")
    common.add_argument("--t-bins", type=int, help="grid nodes along maturity (default 40)")
    common.add_argument("--m-bins", type=int, help="grid nodes along moneyness (default 40)")
    common.add_argument("--out", type=Path, help="output directory (default .)")
    common.add_argument("--format", choices=["csv", "json"], help="output file format (default csv)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cerate", description="Implied certainty equivalent rate surfaces from option chains.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="write scattered points and gridded surfaces")
    sub.add_parser("summarize", parents=[common], help="max/min/mean rate per ticker")
    sub.add_parser("rank", parents=[common], help="investment priority across tickers")
    sub.add_parser("export-plot", parents=[common], help="write gnuplot scripts and grid data")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    settings = load_manifest(args.manifest) if args.manifest else {"jobs": []}
    if len(args.chain) != len(args.meta):
        raise ValueError("--chain and --meta must be given in pairs")
    if args.chain:
        settings["jobs"] = [Job(c, m) for c, m in zip(args.chain, args.meta)]
    for attr, value in [
        ("days_per_year", args.days_per_year),
        ("policy", args.policy),
        ("t_bins", args.t_bins),
        ("m_bins", args.m_bins),
        ("output_dir", args.out),
        ("output_format", args.format),
    ]:
        if value is not None:
            settings[attr] = value
    return RunConfig(**settings)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"cerate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return COMMANDS[args.command](config)


if __name__ == "__main__":
    sys.exit(main())
