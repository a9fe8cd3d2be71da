"""Numerical kernel: mid-prices, business-day year fractions and the implied
certainty equivalent rate from discrete-compounding put-call parity.

Parity relation used throughout::

    C + K / (1 + r)**T = P + S / (1 + q)**T

Solving for r gives the closed form::

    r = [K (1 + q)**T / (S + (P - C)(1 + q)**T)] ** (1/T) - 1

All arithmetic is float64.  Rates are carried together with log(1 + r) so
that growth factors far below machine epsilon (short maturities with deep
discounting) are not lost when r itself rounds to -1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

__all__ = [
    "DayCountConfig",
    "ImpliedRate",
    "NoRootError",
    "NonFiniteRateError",
    "ParityInconsistentError",
    "RateError",
    "RateInputs",
    "WeekendRule",
    "implied_cer",
    "mid_price",
    "parity_residual",
    "solve_rate_bisection",
    "year_fraction",
]

# Smallest double strictly above -1.
_JUST_ABOVE_MINUS_ONE = math.nextafter(-1.0, 0.0)


class RateError(ValueError):
    """Base class for per-point rate failures."""


class ParityInconsistentError(RateError):
    """The parity denominator S + (P - C)(1 + q)^T is not positive."""


class NonFiniteRateError(RateError):
    """An intermediate result overflowed or became NaN."""


class NoRootError(RateError):
    """The parity residual does not change sign on the bracket."""


class WeekendRule(str, enum.Enum):
    WEEKDAYS_ONLY = "weekdays_only"


@dataclass(frozen=True)
class DayCountConfig:
    """Business-day year convention.

    ``holidays`` is empty by default (weekdays only); pass exchange holidays
    to get a holiday-aware count.
    """

    days_per_year: int = 252
    weekend_rule: WeekendRule = WeekendRule.WEEKDAYS_ONLY
    holidays: tuple[date, ...] = field(default=())

    def __post_init__(self):
        if self.days_per_year <= 0:
            raise ValueError(f"days_per_year must be positive, got {self.days_per_year}")
        object.__setattr__(self, "weekend_rule", WeekendRule(self.weekend_rule))


@dataclass(frozen=True)
class RateInputs:
    spot: float
    dividend_yield: float
    maturity_years: float
    strike: float
    call_mid: float
    put_mid: float

    def __post_init__(self):
        for name in ("spot", "dividend_yield", "maturity_years", "strike", "call_mid", "put_mid"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.spot <= 0:
            raise ValueError("spot must be positive")
        if self.strike <= 0:
            raise ValueError("strike must be positive")
        if self.maturity_years <= 0:
            raise ValueError("maturity_years must be positive")
        if self.dividend_yield < 0:
            raise ValueError("dividend_yield must be non-negative")
        if self.call_mid < 0 or self.put_mid < 0:
            raise ValueError("option mids must be non-negative")

    @property
    def dividend_growth(self) -> float:
        """(1 + q)^T"""
        return math.exp(self.maturity_years * math.log1p(self.dividend_yield))

    @property
    def denominator(self) -> float:
        """S + (P - C)(1 + q)^T; the closed form needs this positive."""
        return self.spot + (self.put_mid - self.call_mid) * self.dividend_growth


@dataclass(frozen=True)
class ImpliedRate:
    """An annual discrete-compounding rate ``value`` with ``log_growth`` = log(1 + r).

    ``value`` is rounded toward the true rate's side of -1, so ``value > -1``
    holds even when 1 + r is below double resolution; ``log_growth`` keeps
    the exact growth factor for repricing.
    """

    value: float
    log_growth: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and math.isfinite(self.log_growth)):
            raise NonFiniteRateError("rate is not finite")
        if self.value <= -1.0:
            raise ValueError(f"rate must exceed -1, got {self.value!r}")

    @classmethod
    def from_log_growth(cls, log_growth: float) -> "ImpliedRate":
        if not math.isfinite(log_growth):
            raise NonFiniteRateError("log growth factor is not finite")
        try:
            value = math.expm1(log_growth)
        except OverflowError:
            raise NonFiniteRateError("rate overflows float64") from None
        if value <= -1.0:
            value = _JUST_ABOVE_MINUS_ONE
        return cls(value, log_growth)

    @classmethod
    def from_value(cls, value: float) -> "ImpliedRate":
        if not value > -1.0:
            raise ValueError(f"rate must exceed -1, got {value!r}")
        return cls(value, math.log1p(value))

    def __float__(self):
        return self.value


def mid_price(bid: float, ask: float) -> float:
    """Arithmetic mean of bid and ask; crossed markets raise ``ValueError``."""
    if bid < 0 or ask < 0:
        raise ValueError(f"negative quote: bid={bid}, ask={ask}")
    if bid > ask:
        raise ValueError(f"crossed market: bid {bid} > ask {ask}")
    return (bid + ask) / 2


def year_fraction(start: date, expiry: date, cfg: DayCountConfig | None = None) -> float:
    """Business days in (start, expiry] divided by ``cfg.days_per_year``.

    Weekends are excluded; the start date itself is not counted, the expiry
    date is.  Raises ``ValueError`` unless expiry is after start.
    """
    cfg = cfg or DayCountConfig()
    if expiry <= start:
        raise ValueError(f"non-positive maturity: expiry {expiry} is not after start {start}")
    one = timedelta(days=1)
    days = int(
        np.busday_count(
            start + one,
            expiry + one,
            weekmask="1111100",
            holidays=list(cfg.holidays),
        )
    )
    if days <= 0:
        # Calendar-positive but no business day in between (e.g. Fri -> Sun).
        raise ValueError(f"non-positive maturity: no business day in ({start}, {expiry}]")
    return days / cfg.days_per_year


def implied_cer(inputs: RateInputs) -> ImpliedRate:
    """Closed-form implied certainty equivalent rate.

    Computed as ``log(1 + r) = log(1 + q) + log(K / D) / T`` with
    ``D = S + (P - C)(1 + q)^T``.

    Raises
    ------
    ParityInconsistentError
        If ``D <= 0``; the quotes admit no rate.
    NonFiniteRateError
        If the rate overflows.
    """
    d = inputs.denominator
    if not d > 0:
        raise ParityInconsistentError(f"non-positive denominator D={d!r}")
    log_growth = math.log1p(inputs.dividend_yield) + math.log(inputs.strike / d) / inputs.maturity_years
    return ImpliedRate.from_log_growth(log_growth)


def parity_residual(inputs: RateInputs, rate: ImpliedRate | float) -> float:
    """C + K/(1+r)^T - P - S/(1+q)^T, in currency units.

    Decreasing in r; zero at the implied rate.
    """
    if isinstance(rate, ImpliedRate):
        log_growth = rate.log_growth
    else:
        if not rate > -1.0:
            raise ValueError(f"rate must exceed -1, got {rate!r}")
        log_growth = math.log1p(rate)
    t = inputs.maturity_years
    discounted_strike = inputs.strike * math.exp(-t * log_growth)
    discounted_spot = inputs.spot * math.exp(-t * math.log1p(inputs.dividend_yield))
    return inputs.call_mid + discounted_strike - inputs.put_mid - discounted_spot


def solve_rate_bisection(
    inputs: RateInputs,
    lo: float = -0.999,
    hi: float = 10.0,
    tol: float = 1e-12,
    max_iter: int = 4000,
) -> ImpliedRate:
    """Root of the parity residual in r by plain bisection.

    Stops when the bracket is no wider than ``tol`` or no double lies
    strictly inside it.  Independent of the closed form: only the residual
    is evaluated.  ``lo=-1`` is allowed and stands for the open limit, where
    the residual tends to +inf.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not (-1.0 <= lo < hi):
        raise ValueError(f"need -1 <= lo < hi, got lo={lo}, hi={hi}")
    f_lo = math.inf if lo == -1.0 else parity_residual(inputs, lo)
    f_hi = parity_residual(inputs, hi)
    if f_lo == 0.0:
        return ImpliedRate.from_value(lo)
    if f_hi == 0.0:
        return ImpliedRate.from_value(hi)
    if (f_lo > 0) == (f_hi > 0):
        raise NoRootError(f"no root: residual has the same sign at {lo} and {hi}")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = lo + (hi - lo) / 2
        if mid <= lo or mid >= hi:
            break
        f_mid = parity_residual(inputs, mid)
        if f_mid == 0.0:
            return ImpliedRate.from_value(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    mid = lo + (hi - lo) / 2
    return ImpliedRate.from_value(mid if mid > -1.0 else hi)
