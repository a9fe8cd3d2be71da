"""Investment priority from rate summaries.

A ticker is investable when its policy statistic is strictly positive.
Among investable tickers a lower rate means lower risk, so priority 1 goes
to the smallest positive statistic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .surface import RateSummary


class RankPolicy(str, enum.Enum):
    MEAN = "mean"
    MINIMUM = "min"
    MAXIMUM = "max"

    @classmethod
    def parse(cls, value: "str | RankPolicy") -> "RankPolicy":
        aliases = {"minimum": "min", "maximum": "max"}
        if isinstance(value, cls):
            return value
        return cls(aliases.get(str(value).lower(), str(value).lower()))


@dataclass(frozen=True)
class RankEntry:
    ticker: str
    summary: RateSummary
    investable: bool
    priority: int | None
    statistic: float


@dataclass(frozen=True)
class RankReport:
    entries: tuple[RankEntry, ...]
    policy: RankPolicy

    def order(self) -> list[str]:
        """Tickers with a priority, best first."""
        return [e.ticker for e in self.entries if e.priority is not None]


def classify(summary: RateSummary, policy: RankPolicy | str = RankPolicy.MEAN) -> bool:
    return summary.statistic(RankPolicy.parse(policy).value) > 0


def rank(
    summaries: Iterable[tuple[str, RateSummary]], policy: RankPolicy | str = RankPolicy.MEAN
) -> RankReport:
    """Rank tickers by ascending positive policy statistic.

    Ties break on the ticker symbol.  Non-investable tickers follow the
    ranked ones without a priority, highest statistic first.
    """
    policy = RankPolicy.parse(policy)
    summaries = list(summaries)
    tickers = [t for t, _ in summaries]
    if len(set(tickers)) != len(tickers):
        raise ValueError("duplicate ticker in rank input")

    scored = [(t, s, s.statistic(policy.value)) for t, s in summaries]
    good = sorted((x for x in scored if x[2] > 0), key=lambda x: (x[2], x[0]))
    bad = sorted((x for x in scored if not x[2] > 0), key=lambda x: (-x[2], x[0]))
    entries = [RankEntry(t, s, True, i, v) for i, (t, s, v) in enumerate(good, 1)]
    entries += [RankEntry(t, s, False, None, v) for t, s, v in bad]
    return RankReport(tuple(entries), policy)
