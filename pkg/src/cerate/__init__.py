"""Implied certainty equivalent rates from option chains via discrete put-call parity."""

from .core import (
    DayCountConfig,
    ImpliedRate,
    NoRootError,
    NonFiniteRateError,
    ParityInconsistentError,
    RateError,
    RateInputs,
    implied_cer,
    mid_price,
    parity_residual,
    solve_rate_bisection,
    year_fraction,
)
from .ingest import (
    ChainSnapshot,
    IngestError,
    IngestReport,
    OptionQuote,
    SnapshotError,
    load_snapshot,
    parse_chain_file,
)
from .ranking import RankEntry, RankPolicy, RankReport, classify, rank
from .surface import (
    CerPoint,
    CerSurface,
    EmptySurfaceError,
    GriddedSurface,
    RateSummary,
    build_surface,
    grid_surface,
    moneyness_sensitivity,
    summarize,
)

__version__ = "0.1.0"
