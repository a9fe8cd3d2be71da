"""Option-chain and valuation-metadata ingestion.

Chain files carry one row per (expiry, strike) with call and put bid/ask.
CSV needs the exact header ``expiry,strike,call_bid,call_ask,put_bid,put_ask``;
JSON is an array of objects with the same six keys.  Row-level problems are
rejected and reported, never fatal.  Metadata (ticker, start date, spot,
dividend yield) lives in a separate ``key = value`` or JSON file.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

CHAIN_COLUMNS = ("expiry", "strike", "call_bid", "call_ask", "put_bid", "put_ask")
META_FIELDS = ("ticker", "start_date", "spot", "dividend_yield")

_DECIMAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_ISO_DATE = re.compile(r"\d{4}-\d{2}-\d{2}")


class IngestError(Exception):
    """Fatal ingestion problem: unreadable file, unknown format, bad header."""


class SnapshotError(ValueError):
    """Metadata or assembled snapshot violates its invariants."""


class RowError(ValueError):
    """A single chain row is invalid; carries the rejection reason."""


@dataclass(frozen=True)
class OptionQuote:
    expiry: date
    strike: float
    call_bid: float
    call_ask: float
    put_bid: float
    put_ask: float

    def __post_init__(self):
        for name in CHAIN_COLUMNS[1:]:
            value = getattr(self, name)
            if not math.isfinite(value):
                raise RowError(f"non-finite {name}")
        if self.strike <= 0:
            raise RowError("non-positive strike")
        for name in CHAIN_COLUMNS[2:]:
            if getattr(self, name) < 0:
                raise RowError(f"negative {name}")
        if self.call_bid > self.call_ask:
            raise RowError("crossed call market")
        if self.put_bid > self.put_ask:
            raise RowError("crossed put market")

    @property
    def key(self) -> tuple[date, float]:
        return (self.expiry, self.strike)


@dataclass(frozen=True)
class IngestReport:
    accepted: int
    rejected: int
    rejection_reasons: tuple[tuple[int, str], ...] = ()

    @property
    def total(self) -> int:
        return self.accepted + self.rejected


@dataclass(frozen=True)
class ChainSnapshot:
    ticker: str
    start_date: date
    spot: float
    dividend_yield: float
    quotes: tuple[OptionQuote, ...]
    report: IngestReport | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.ticker:
            raise SnapshotError("empty ticker")
        if not (math.isfinite(self.spot) and self.spot > 0):
            raise SnapshotError("non-positive spot")
        if not (math.isfinite(self.dividend_yield) and self.dividend_yield >= 0):
            raise SnapshotError("negative dividend yield")
        if not self.quotes:
            raise SnapshotError("empty accepted quote set")
        object.__setattr__(self, "quotes", tuple(self.quotes))
        keys = [q.key for q in self.quotes]
        if len(set(keys)) != len(keys):
            raise SnapshotError("duplicate (expiry, strike) quote")
        for q in self.quotes:
            if q.expiry <= self.start_date:
                raise SnapshotError(f"quote {q.key} has non-positive maturity")


def _parse_decimal(text, name: str) -> float:
    if isinstance(text, bool):
        raise RowError(f"invalid number in {name}")
    if isinstance(text, (int, float)):
        try:
            value = float(text)
        except OverflowError:
            raise RowError(f"non-finite {name}") from None
    else:
        text = str(text).strip()
        if not _DECIMAL.fullmatch(text):
            raise RowError(f"invalid number in {name}")
        value = float(text)
    if not math.isfinite(value):
        raise RowError(f"non-finite {name}")
    return value


def _parse_date(text, name: str = "expiry") -> date:
    text = str(text).strip()
    if not _ISO_DATE.fullmatch(text):
        raise RowError(f"invalid {name}")
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise RowError(f"invalid {name}") from None


def _quote_from_fields(values: dict) -> OptionQuote:
    return OptionQuote(
        expiry=_parse_date(values["expiry"]),
        **{name: _parse_decimal(values[name], name) for name in CHAIN_COLUMNS[1:]},
    )


def _csv_rows(text: str) -> Iterable[tuple[int, dict | str]]:
    reader = csv.reader(io.StringIO(text))
    header = None
    index = 0
    for row in reader:
        if len(row) <= 1 and not "".join(row).strip():
            continue
        if header is None:
            header = tuple(cell.strip() for cell in row)
            if header != CHAIN_COLUMNS:
                raise IngestError(
                    f"header mismatch: expected {','.join(CHAIN_COLUMNS)}, got {','.join(header)}"
                )
            continue
        if len(row) != len(CHAIN_COLUMNS):
            yield index, f"malformed row: expected {len(CHAIN_COLUMNS)} fields, got {len(row)}"
        else:
            yield index, dict(zip(CHAIN_COLUMNS, row))
        index += 1
    if header is None:
        raise IngestError("header mismatch: file is empty")


def _json_rows(text: str) -> Iterable[tuple[int, dict | str]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(f"invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise IngestError("chain JSON must be an array of objects")
    for index, item in enumerate(data):
        if not isinstance(item, dict) or set(item) != set(CHAIN_COLUMNS):
            yield index, f"malformed row: expected object with keys {','.join(CHAIN_COLUMNS)}"
        else:
            yield index, item


def parse_chain_text(text: str, format: str = "csv") -> tuple[list[OptionQuote], IngestReport]:
    """Parse chain text; see :func:`parse_chain_file`."""
    if format == "csv":
        rows = _csv_rows(text)
    elif format == "json":
        rows = _json_rows(text)
    else:
        raise IngestError(f"unknown format {format!r}")

    quotes: list[OptionQuote] = []
    seen: set[tuple[date, float]] = set()
    reasons: list[tuple[int, str]] = []
    for index, row in rows:
        if isinstance(row, str):
            reasons.append((index, row))
            continue
        try:
            quote = _quote_from_fields(row)
        except RowError as exc:
            reasons.append((index, str(exc)))
            continue
        if quote.key in seen:
            reasons.append((index, "duplicate"))
            continue
        seen.add(quote.key)
        quotes.append(quote)
    for index, reason in reasons:
        logger.info("rejected row %d: %s", index, reason)
    return quotes, IngestReport(len(quotes), len(reasons), tuple(reasons))


def parse_chain_file(path, format: str | None = None) -> tuple[list[OptionQuote], IngestReport]:
    """Read a chain file and return the valid quotes plus an :class:`IngestReport`.

    ``format`` is ``"csv"`` or ``"json"``; when omitted it is taken from the
    file suffix (``.json`` means JSON, anything else CSV).  Row indices in the
    report count data rows from 0, skipping the header and blank lines.
    Duplicate (expiry, strike) rows keep the first valid occurrence.
    """
    path = Path(path)
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "csv"
    if format not in ("csv", "json"):
        raise IngestError(f"unknown format {format!r}")
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    return parse_chain_text(text, format)


def parse_metadata_text(text: str) -> dict:
    """Metadata as a JSON object, or ``key = value`` lines with ``#`` comments."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            raw = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise SnapshotError(f"invalid metadata JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise SnapshotError("metadata JSON must be an object")
    else:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SnapshotError(f"metadata line {lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            raw[key] = value

    missing = [name for name in META_FIELDS if name not in raw]
    if missing:
        raise SnapshotError(f"missing metadata field: {', '.join(missing)}")
    try:
        spot = _parse_decimal(raw["spot"], "spot")
        dividend_yield = _parse_decimal(raw["dividend_yield"], "dividend_yield")
        start = _parse_date(raw["start_date"], "start_date")
    except RowError as exc:
        raise SnapshotError(f"metadata: {exc}") from None
    if spot <= 0:
        raise SnapshotError("non-positive spot")
    if dividend_yield < 0:
        raise SnapshotError("negative dividend yield")
    return {
        "ticker": str(raw["ticker"]).strip(),
        "start_date": start,
        "spot": spot,
        "dividend_yield": dividend_yield,
    }


def load_metadata(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    return parse_metadata_text(text)


def assemble_snapshot(
    meta: dict, quotes: Sequence[OptionQuote], report: IngestReport | None = None
) -> ChainSnapshot:
    """Combine metadata with parsed quotes, rejecting quotes that expire on or before the start date.

    Rejected indices refer to positions in ``quotes``.
    """
    start = meta["start_date"]
    kept = []
    late: list[tuple[int, str]] = []
    for i, quote in enumerate(quotes):
        if quote.expiry <= start:
            late.append((i, "non-positive maturity"))
        else:
            kept.append(quote)
    if report is None:
        report = IngestReport(len(quotes), 0)
    report = IngestReport(
        report.accepted - len(late),
        report.rejected + len(late),
        report.rejection_reasons + tuple(late),
    )
    for index, reason in late:
        logger.info("rejected quote %d: %s", index, reason)
    return ChainSnapshot(
        ticker=meta["ticker"],
        start_date=start,
        spot=meta["spot"],
        dividend_yield=meta["dividend_yield"],
        quotes=tuple(kept),
        report=report,
    )


def load_snapshot(chain_path, meta_path) -> ChainSnapshot:
    """Load a chain file and its metadata into a validated :class:`ChainSnapshot`.

    The combined ingest report is available as ``snapshot.report``.  Quotes
    rejected for expiring on or before the start date are reported with
    their index among the parsed quotes, not the raw file row.
    """
    meta = load_metadata(meta_path)
    quotes, report = parse_chain_file(chain_path)
    return assemble_snapshot(meta, quotes, report)


def format_decimal(value: float) -> str:
    """Shortest round-trip text for ``value``; integral values drop the ``.0``."""
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def quotes_to_csv(quotes: Iterable[OptionQuote]) -> str:
    """Canonical CSV text for ``quotes``, in the given order, ``\\n`` line endings."""
    lines = [",".join(CHAIN_COLUMNS)]
    for q in quotes:
        lines.append(
            ",".join(
                [q.expiry.isoformat()] + [format_decimal(getattr(q, name)) for name in CHAIN_COLUMNS[1:]]
            )
        )
    return "\n".join(lines) + "\n"


def metadata_to_text(ticker: str, start_date: date, spot: float, dividend_yield: float) -> str:
    return (
        f"ticker = {ticker}\n"
        f"start_date = {start_date.isoformat()}\n"
        f"spot = {format_decimal(spot)}\n"
        f"dividend_yield = {format_decimal(dividend_yield)}\n"
    )
