"""Output files: points, grids, summary and rank tables, failure reports, gnuplot scripts.

Writes are atomic (temp file in the target directory, then rename), and
every formatter is deterministic so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import tempfile
from pathlib import Path
from typing import Iterable

from .ingest import format_decimal
from .ranking import RankReport
from .surface import CerSurface, GriddedSurface, RateSummary

POINT_COLUMNS = ("maturity_years", "strike", "moneyness", "rate")
GRID_COLUMNS = ("maturity_years", "moneyness", "rate")
SUMMARY_COLUMNS = ("Company", "Maximum value", "Minimum value", "Mean value")
FAILURE_COLUMNS = ("ticker", "stage", "row", "expiry", "strike", "reason")


class MissingGridError(FileNotFoundError):
    pass


def safe_name(ticker: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", ticker) or "_"


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _csv_text(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _full(value: float) -> str:
    return "nan" if math.isnan(value) else format_decimal(value)


def fmt4(value: float) -> str:
    text = f"{value:.4f}"
    return "0.0000" if text == "-0.0000" else text


def points_text(surface: CerSurface, fmt: str = "csv") -> str:
    if fmt == "json":
        return _json_text([{c: getattr(p, c) for c in POINT_COLUMNS} for p in surface.points])
    return _csv_text(POINT_COLUMNS, ([_full(getattr(p, c)) for c in POINT_COLUMNS] for p in surface.points))


def grid_text(grid: GriddedSurface, fmt: str = "csv") -> str:
    """CSV grids are long-form, one block per maturity separated by blank lines (gnuplot pm3d layout)."""
    if fmt == "json":
        return _json_text(
            {
                "t_axis": [float(t) for t in grid.t_axis],
                "m_axis": [float(m) for m in grid.m_axis],
                "values": [[None if math.isnan(v) else float(v) for v in row] for row in grid.values],
            }
        )
    lines = [",".join(GRID_COLUMNS)]
    for i, t in enumerate(grid.t_axis):
        if i:
            lines.append("")
        for j, m in enumerate(grid.m_axis):
            lines.append(f"{_full(t)},{_full(m)},{_full(grid.values[i, j])}")
    return "\n".join(lines) + "\n"


def summary_text(rows: list[tuple[str, RateSummary | str]], fmt: str = "csv") -> str:
    """Rows are (ticker, summary) or (ticker, failure reason)."""
    if fmt == "json":
        out = []
        for ticker, item in rows:
            if isinstance(item, RateSummary):
                out.append({"ticker": ticker, "maximum": item.maximum, "minimum": item.minimum, "mean": item.mean})
            else:
                out.append({"ticker": ticker, "error": item})
        return _json_text(out)
    body = []
    for ticker, item in rows:
        if isinstance(item, RateSummary):
            body.append([ticker, fmt4(item.maximum), fmt4(item.minimum), fmt4(item.mean)])
        else:
            body.append([ticker, f"failed: {item}", "", ""])
    return _csv_text(SUMMARY_COLUMNS, body)


def rank_text(report: RankReport, fmt: str = "csv") -> str:
    stat = report.policy.value
    if fmt == "json":
        return _json_text(
            {
                "policy": stat,
                "entries": [
                    {"priority": e.priority, "ticker": e.ticker, stat: e.statistic, "investable": e.investable}
                    for e in report.entries
                ],
            }
        )
    rows = (
        ["-" if e.priority is None else e.priority, e.ticker, fmt4(e.statistic), "yes" if e.investable else "no"]
        for e in report.entries
    )
    return _csv_text(("priority", "ticker", stat, "investable"), rows)


def failures_text(failures: list[dict], fmt: str = "csv") -> str:
    if fmt == "json":
        return _json_text(failures)
    return _csv_text(FAILURE_COLUMNS, ([f.get(c, "") for c in FAILURE_COLUMNS] for f in failures))


def gnuplot_script(ticker: str, grid_path) -> str:
    """A gnuplot script plotting the CSV grid at ``grid_path``.

    The grid is referenced by file name only, so the script is meant to be
    run from the directory holding both files.
    """
    grid_path = Path(grid_path)
    if not grid_path.is_file():
        raise MissingGridError(f"grid file not found: {grid_path}")
    name = safe_name(ticker)
    return "\n".join(
        [
            f"# implied certainty equivalent rate surface: {ticker}",
            f"# run from this directory: gnuplot {name}.gp",
            'set datafile separator ","',
            'set datafile missing "nan"',
            "set terminal pngcairo size 1000,750",
            f'set output "{name}.png"',
            f'set title "{ticker}"',
            'set xlabel "time to maturity"',
            'set ylabel "moneyness"',
            'set zlabel "implied certainty equivalent rate" rotate parallel',
            "set pm3d depthorder",
            "set palette rgbformulae 33,13,10",
            "set grid",
            f'splot "{grid_path.name}" skip 1 using 1:2:3 with pm3d notitle',
            "",
        ]
    )
