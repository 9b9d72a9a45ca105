"""Log returns and their aggregation to coarser time scales."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from .errors import DegenerateInputError, InsufficientDataError, InvalidParameterError
from .ingestion import PriceSeries

__all__ = [
    "Frequency",
    "DAILY",
    "WEEKLY",
    "MONTHLY",
    "QUARTERLY",
    "STANDARD_FREQUENCIES",
    "ReturnSeries",
    "log_returns",
    "aggregate",
]


@dataclass(frozen=True)
class Frequency:
    """Return horizon, expressed as a fixed count of trading days."""

    label: str
    block_len: int

    def __post_init__(self):
        if self.block_len < 1:
            raise InvalidParameterError(f"block length must be >= 1, got {self.block_len}")


DAILY = Frequency("daily", 1)
WEEKLY = Frequency("weekly", 5)
MONTHLY = Frequency("monthly", 21)
QUARTERLY = Frequency("quarterly", 63)
STANDARD_FREQUENCIES = (DAILY, WEEKLY, MONTHLY, QUARTERLY)


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    symbol: str
    frequency: Frequency
    values: np.ndarray
    start_date: date | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise InsufficientDataError(f"{self.symbol}: return series is empty")
        if not np.all(np.isfinite(values)):
            raise DegenerateInputError(f"{self.symbol}: non-finite returns")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, ReturnSeries):
            return NotImplemented
        return (
            self.symbol == other.symbol
            and self.frequency == other.frequency
            and self.start_date == other.start_date
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def log_returns(series: PriceSeries) -> ReturnSeries:
    """Close-to-close log returns over consecutive available bars.

    ``values[i] = ln(close[i+1]) - ln(close[i])``; the start date is the date
    of the first return, i.e. of the second bar.
    """
    closes = series.closes
    if closes.size < 2:
        raise InsufficientDataError(f"{series.symbol}: need at least 2 prices")
    if np.any(closes <= 0):
        raise DegenerateInputError(f"{series.symbol}: non-positive close")
    values = np.diff(np.log(closes))
    return ReturnSeries(
        symbol=series.symbol,
        frequency=DAILY,
        values=values,
        start_date=series.bars[1].date,
    )


def aggregate(returns: ReturnSeries, target: Frequency) -> ReturnSeries:
    """Sum daily log returns over consecutive non-overlapping blocks.

    Blocks are ``target.block_len`` trading days long; the trailing partial
    block is dropped, so the output has ``len(returns) // block_len`` values.
    """
    if returns.frequency.block_len != 1:
        raise InvalidParameterError("aggregation requires daily input")
    if target.block_len <= 1:
        raise InvalidParameterError("target block length must exceed 1")
    n_blocks = len(returns) // target.block_len
    if n_blocks == 0:
        raise InsufficientDataError(
            f"{returns.symbol}: {len(returns)} daily returns is too short for "
            f"{target.label} aggregation"
        )
    used = returns.values[: n_blocks * target.block_len]
    values = used.reshape(n_blocks, target.block_len).sum(axis=1)
    return ReturnSeries(
        symbol=returns.symbol,
        frequency=target,
        values=values,
        start_date=returns.start_date,
    )
