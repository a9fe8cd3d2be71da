"""Parity-consistent synthetic chains for recovery tests and worked fixtures.

Quotes are priced so that discrete put-call parity holds exactly at a chosen
rate for each expiry, which makes the implied rate known in advance.
"""

from __future__ import annotations

import math
from datetime import date
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .core import DayCountConfig, year_fraction
from .ingest import OptionQuote, metadata_to_text, quotes_to_csv


def default_expiries(start: date, n: int = 20, first: int = 21, last: int = 750) -> list[date]:
    """``n`` expiries spread evenly in business days from ``first`` to ``last`` after ``start``."""
    offsets = np.unique(np.round(np.linspace(first, last, n)).astype(int))
    days = np.busday_offset(np.datetime64(start, "D"), offsets, roll="forward")
    return [d.astype(object) for d in days]


def default_strikes(spot: float, n: int = 20, low: float = 0.6, high: float = 1.6) -> list[float]:
    return [round(k, 2) for k in np.linspace(low * spot, high * spot, n)]


def parity_quotes(
    spot: float,
    dividend_yield: float,
    start: date,
    expiries: Sequence[date],
    strikes: Sequence[float],
    rate: float | Sequence[float],
    cfg: DayCountConfig | None = None,
    half_spread: float = 0.0,
) -> list[OptionQuote]:
    """Quotes whose mids satisfy parity at ``rate``.

    ``rate`` is one flat rate or one rate per expiry.  Calls carry a time
    value of ``2% * spot * sqrt(T)`` on top of the forward intrinsic gap,
    and puts follow from parity, so both mids stay non-negative.
    """
    cfg = cfg or DayCountConfig()
    rates = [rate] * len(expiries) if np.isscalar(rate) else list(rate)
    if len(rates) != len(expiries):
        raise ValueError("need one rate per expiry")
    quotes = []
    for expiry, r in zip(expiries, rates):
        t = year_fraction(start, expiry, cfg)
        discounted_spot = spot * (1 + dividend_yield) ** (-t)
        for k in strikes:
            gap = discounted_spot - k * (1 + r) ** (-t)  # C - P
            extra = 0.02 * spot * math.sqrt(t)
            call = max(gap, 0.0) + extra
            put = call - gap
            hc = min(half_spread, call)
            hp = min(half_spread, put)
            quotes.append(OptionQuote(expiry, float(k), call - hc, call + hc, put - hp, put + hp))
    return quotes


def term_structure(maximum: float, minimum: float, mean: float, n: int) -> list[float]:
    """``n`` rates falling from ``maximum`` to ``minimum`` whose plain average is ``mean``.

    Shape is ``min + (max - min) * (1 - x**p)`` on ``x = 0 .. 1`` with ``p``
    solved for the mean; attainable means lie strictly between
    ``min + span/n`` and ``max - span/n``.
    """
    if not minimum < mean < maximum:
        raise ValueError("need minimum < mean < maximum")
    x = np.linspace(0.0, 1.0, n)
    target = (mean - minimum) / (maximum - minimum)

    def gap(log_p):
        return 1.0 - np.mean(x ** math.exp(log_p)) - target

    log_p = brentq(gap, -20.0, 20.0, xtol=1e-14)
    w = 1.0 - x ** math.exp(log_p)
    rates = minimum + (maximum - minimum) * w
    rates[0], rates[-1] = maximum, minimum
    return [float(v) for v in rates]


def write_fixture(
    directory,
    ticker: str,
    spot: float,
    dividend_yield: float,
    start: date,
    quotes: Sequence[OptionQuote],
) -> tuple[Path, Path]:
    """Write ``<ticker>_chain.csv`` and ``<ticker>.meta``; returns both paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    chain = directory / f"{ticker}_chain.csv"
    meta = directory / f"{ticker}.meta"
    chain.write_text(quotes_to_csv(quotes), encoding="utf-8")
    meta.write_text(metadata_to_text(ticker, start, spot, dividend_yield), encoding="utf-8")
    return chain, meta
