"""Per-ticker rate surfaces over (time to maturity, moneyness)."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from datetime import date
from typing import NamedTuple

import numpy as np
from scipy.interpolate import LinearNDInterpolator
from scipy.spatial import Delaunay, QhullError

from .core import DayCountConfig, RateInputs, implied_cer, mid_price, year_fraction
from .ingest import ChainSnapshot

logger = logging.getLogger(__name__)


class EmptySurfaceError(ValueError):
    pass


class CerPoint(NamedTuple):
    maturity_years: float
    strike: float
    moneyness: float
    rate: float
    expiry: date | None = None


class PointFailure(NamedTuple):
    expiry: date
    strike: float
    reason: str


@dataclass(frozen=True)
class CerSurface:
    ticker: str
    points: tuple[CerPoint, ...]
    failures: tuple[PointFailure, ...] = ()

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points], dtype=float)


@dataclass(frozen=True)
class RateSummary:
    maximum: float
    minimum: float
    mean: float

    def __post_init__(self):
        if not self.minimum <= self.mean <= self.maximum:
            raise ValueError(f"inconsistent summary {self}")

    def statistic(self, name: str) -> float:
        return {"mean": self.mean, "min": self.minimum, "max": self.maximum}[name]


@dataclass(frozen=True)
class GriddedSurface:
    """Rates on a regular grid; ``values[i, j]`` sits at ``(t_axis[i], m_axis[j])``, NaN if missing."""

    t_axis: np.ndarray
    m_axis: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.t_axis), len(self.m_axis)):
            raise ValueError("grid shape does not match its axes")


def build_surface(snapshot: ChainSnapshot, cfg: DayCountConfig | None = None) -> CerSurface:
    """One point per quote, using bid/ask mids and business-day maturities.

    Quotes whose rate cannot be computed are kept as failures.  Output is
    ordered by (T, K) and does not depend on the order of ``snapshot.quotes``.
    Two calendar expiries that land on the same business-day maturity keep
    the earlier expiry.
    """
    cfg = cfg or DayCountConfig()
    points: list[CerPoint] = []
    failures: list[PointFailure] = []
    seen: set[tuple[float, float]] = set()
    for quote in sorted(snapshot.quotes, key=lambda q: q.key):
        try:
            t = year_fraction(snapshot.start_date, quote.expiry, cfg)
            inputs = RateInputs(
                spot=snapshot.spot,
                dividend_yield=snapshot.dividend_yield,
                maturity_years=t,
                strike=quote.strike,
                call_mid=mid_price(quote.call_bid, quote.call_ask),
                put_mid=mid_price(quote.put_bid, quote.put_ask),
            )
            rate = implied_cer(inputs)
        except ValueError as exc:  # RateError included
            failures.append(PointFailure(quote.expiry, quote.strike, str(exc)))
            continue
        if (t, quote.strike) in seen:
            failures.append(PointFailure(quote.expiry, quote.strike, "duplicate (T, K)"))
            continue
        seen.add((t, quote.strike))
        points.append(CerPoint(t, quote.strike, snapshot.spot / quote.strike, rate.value, quote.expiry))
    if not points:
        raise EmptySurfaceError(f"empty surface for {snapshot.ticker}: every quote failed")
    points.sort(key=lambda p: (p.maturity_years, p.strike))
    for failure in failures:
        logger.info("%s %s K=%s: %s", snapshot.ticker, failure.expiry, failure.strike, failure.reason)
    return CerSurface(snapshot.ticker, tuple(points), tuple(failures))


def summarize(surface: CerSurface) -> RateSummary:
    """Max, min and unweighted mean of the point rates."""
    if not surface.points:
        raise EmptySurfaceError("cannot summarize an empty surface")
    rates = [p.rate for p in surface.points]
    lo, hi = min(rates), max(rates)
    mean = math.fsum(rates) / len(rates)
    # fsum/n can land one ulp outside [lo, hi]
    return RateSummary(maximum=hi, minimum=lo, mean=min(max(mean, lo), hi))


def _axis(values: np.ndarray, bins: int) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return np.array([lo])
    axis = np.linspace(lo, hi, bins)
    axis[-1] = hi
    return axis


def grid_surface(surface: CerSurface, t_bins: int = 40, m_bins: int = 40) -> GriddedSurface:
    """Piecewise-linear gridding of the scattered points, no extrapolation.

    Each grid node takes the barycentric interpolation over the Delaunay
    triangle containing it; nodes outside the convex hull are NaN.  A
    maturity or moneyness axis with zero span collapses to length 1 and the
    other axis is interpolated in 1-D.
    """
    if t_bins < 2 or m_bins < 2:
        raise ValueError("t_bins and m_bins must be at least 2")
    if not surface.points:
        raise EmptySurfaceError("cannot grid an empty surface")
    t = np.array([p.maturity_years for p in surface.points])
    m = np.array([p.moneyness for p in surface.points])
    r = surface.rates
    t_axis, m_axis = _axis(t, t_bins), _axis(m, m_bins)

    if len(t_axis) == 1 and len(m_axis) == 1:
        values = np.array([[r.mean()]])
    elif len(t_axis) == 1 or len(m_axis) == 1:
        along, axis = (m, m_axis) if len(t_axis) == 1 else (t, t_axis)
        order = np.argsort(along, kind="stable")
        line = np.interp(axis, along[order], r[order])
        values = line.reshape(1, -1) if len(t_axis) == 1 else line.reshape(-1, 1)
    else:
        values = _interpolate_2d(t, m, r, t_axis, m_axis)

    with np.errstate(invalid="ignore"):
        values = np.where(np.isnan(values), np.nan, np.clip(values, r.min(), r.max()))
    return GriddedSurface(t_axis, m_axis, values)


def _interpolate_2d(t, m, r, t_axis, m_axis) -> np.ndarray:
    # Triangulate in span-normalised coordinates so short T and wide moneyness
    # ranges give comparable triangle shapes.
    t0, ts = t.min(), np.ptp(t)
    m0, ms = m.min(), np.ptp(m)
    pts = np.column_stack([(t - t0) / ts, (m - m0) / ms])
    tt, mm = np.meshgrid((t_axis - t0) / ts, (m_axis - m0) / ms, indexing="ij")
    try:
        tri = Delaunay(pts)
    except QhullError:
        logger.warning("points are collinear; grid left empty")
        return np.full((len(t_axis), len(m_axis)), np.nan)
    interp = LinearNDInterpolator(tri, r, fill_value=np.nan)
    return interp(tt, mm)


def moneyness_sensitivity(surface: CerSurface) -> list[tuple[float, float]]:
    """(T, max rate - min rate across strikes at T) for each distinct maturity."""
    by_t: dict[float, list[float]] = {}
    for p in surface.points:
        by_t.setdefault(p.maturity_years, []).append(p.rate)
    return [(t, max(rs) - min(rs)) for t, rs in sorted(by_t.items())]
