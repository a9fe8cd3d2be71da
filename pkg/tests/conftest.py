from datetime import date, timedelta
from pathlib import Path

import pytest

from cerate.ingest import ChainSnapshot
from cerate.synthetic import default_expiries, default_strikes, parity_quotes, write_fixture

DATA = Path(__file__).parent / "data"
START = date(2023, 1, 3)

_acceptance_lines: list[str] = []


def record_criterion(number: int, name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    line = f"[{status}] criterion {number}: {name}"
    if detail:
        line += f" ({detail})"
    _acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


def weekdays_between(start: date, expiry: date) -> int:
    """Calendar-walk count of Mon-Fri days in (start, expiry]."""
    n = 0
    day = start + timedelta(days=1)
    while day <= expiry:
        if day.weekday() < 5:
            n += 1
        day += timedelta(days=1)
    return n


def flat_snapshot(rate, q=0.0, spot=100.0, n_t=20, n_k=20, ticker="SYNTH", half_spread=0.0):
    expiries = default_expiries(START, n_t)
    strikes = default_strikes(spot, n_k)
    quotes = parity_quotes(spot, q, START, expiries, strikes, rate, half_spread=half_spread)
    return ChainSnapshot(ticker, START, spot, q, tuple(quotes))


@pytest.fixture
def synth_snapshot():
    return flat_snapshot(0.03, q=0.02)


@pytest.fixture
def synth_files(tmp_path):
    snap = flat_snapshot(0.03, q=0.02, n_t=8, n_k=6)
    chain, meta = write_fixture(tmp_path / "in", "SYNTH", snap.spot, snap.dividend_yield, START, snap.quotes)
    return chain, meta
