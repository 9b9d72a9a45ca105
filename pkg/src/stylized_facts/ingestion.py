"""Parsing of daily OHLCV CSV exports into validated price series.

The accepted layout is the one produced by investing.com historical-data
downloads::

    "Date","Price","Open","High","Low","Vol.","Change %"
    "Nov 30, 2017","1,234.50","1,220.00","1,240.10","1,215.00","1.2M","0.85%"

Plain column names (``close``, ``volume``, ``change_pct``) and ISO dates are
accepted as well.  Only the close feeds the downstream battery; the other
fields are validated and kept on the bars.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path

import numpy as np

from .errors import InsufficientDataError, ParseError

__all__ = [
    "PriceBar",
    "PriceSeries",
    "parse_price_csv",
    "load_price_csv",
    "format_price_csv",
]

_COLUMN_ALIASES = {
    "date": "date",
    "price": "close",
    "close": "close",
    "open": "open",
    "high": "high",
    "low": "low",
    "vol.": "volume",
    "vol": "volume",
    "volume": "volume",
    "change %": "change_pct",
    "change%": "change_pct",
    "change_pct": "change_pct",
    "chg%": "change_pct",
}
_REQUIRED = ("date", "close", "open", "high", "low", "volume", "change_pct")
_VOLUME_SUFFIX = {"K": 1e3, "M": 1e6, "B": 1e9}
_DATE_FORMATS = ("%Y-%m-%d", "%b %d, %Y")


@dataclass(frozen=True)
class PriceBar:
    """One trading day of OHLCV data."""

    date: date
    close: float
    open: float
    high: float
    low: float
    volume: int
    change_pct: float

    def __post_init__(self):
        for name in ("close", "open", "high", "low", "change_pct"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "volume", int(self.volume))
        for name in ("close", "open", "high", "low", "change_pct"):
            if not math.isfinite(getattr(self, name)):
                raise ParseError(f"{self.date}: non-finite {name}")
        if self.close <= 0:
            raise ParseError(f"{self.date}: close must be positive, got {self.close}")
        if self.open <= 0:
            raise ParseError(f"{self.date}: open must be positive, got {self.open}")
        if not (self.low <= self.high):
            raise ParseError(f"{self.date}: low {self.low} exceeds high {self.high}")
        if not (self.low <= self.close <= self.high):
            raise ParseError(f"{self.date}: close {self.close} outside [low, high]")
        if not (self.low <= self.open <= self.high):
            raise ParseError(f"{self.date}: open {self.open} outside [low, high]")
        if self.volume < 0:
            raise ParseError(f"{self.date}: negative volume {self.volume}")


@dataclass(frozen=True)
class PriceSeries:
    """Dated bars for one instrument, strictly increasing in date.

    ``rejected_rows`` lists the 1-based data-row numbers that were dropped
    during parsing; it does not take part in equality.
    """

    symbol: str
    bars: tuple[PriceBar, ...]
    rejected_rows: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "bars", tuple(self.bars))
        if len(self.bars) < 2:
            raise InsufficientDataError(
                f"{self.symbol}: need at least 2 bars, got {len(self.bars)}"
            )
        for prev, cur in zip(self.bars, self.bars[1:]):
            if cur.date <= prev.date:
                raise ParseError(
                    f"{self.symbol}: dates not strictly increasing at {cur.date}"
                )

    def __len__(self):
        return len(self.bars)

    @property
    def closes(self) -> np.ndarray:
        return np.array([b.close for b in self.bars], dtype=float)

    @property
    def dates(self) -> list[date]:
        return [b.date for b in self.bars]


def _parse_date(text: str) -> date:
    text = text.strip()
    for fmt in _DATE_FORMATS:
        try:
            return datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    raise ValueError(f"unrecognised date {text!r}")


def _parse_number(text: str) -> float:
    text = text.strip().replace(",", "")
    if not text:
        raise ValueError("empty numeric field")
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"non-finite number {text!r}")
    return value


def _parse_volume(text: str) -> int:
    text = text.strip().replace(",", "")
    scale = 1.0
    if text and text[-1].upper() in _VOLUME_SUFFIX:
        scale = _VOLUME_SUFFIX[text[-1].upper()]
        text = text[:-1]
    return int(round(_parse_number(text) * scale))


def _parse_percent(text: str) -> float:
    text = text.strip()
    if text.endswith("%"):
        text = text[:-1]
    return _parse_number(text)


def _header_map(header: list[str]) -> dict[str, int]:
    mapping = {}
    for idx, name in enumerate(header):
        key = _COLUMN_ALIASES.get(name.strip().lstrip("﻿").lower())
        if key is not None and key not in mapping:
            mapping[key] = idx
    missing = [col for col in _REQUIRED if col not in mapping]
    if missing:
        raise ParseError(f"header is missing columns: {', '.join(missing)}")
    return mapping


def parse_price_csv(raw: str, symbol: str) -> PriceSeries:
    """Parse CSV text into a :class:`PriceSeries`.

    Rows with any unparseable field are dropped (their row numbers are kept
    in ``rejected_rows``).  Values that parse but violate a bar invariant,
    such as a non-positive close, abort the whole parse since they indicate
    a corrupt file rather than a missing cell.

    Raises
    ------
    ParseError
        Missing header columns, duplicate dates or invalid bar values.
    InsufficientDataError
        Fewer than two valid rows.
    """
    reader = csv.reader(io.StringIO(raw))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{symbol}: empty input") from None
    cols = _header_map(header)

    bars: dict[date, PriceBar] = {}
    rejected = []
    for rownum, row in enumerate(reader, start=1):
        if not any(cell.strip() for cell in row):
            continue
        try:
            fields = {key: row[idx] for key, idx in cols.items()}
            day = _parse_date(fields["date"])
            values = dict(
                close=_parse_number(fields["close"]),
                open=_parse_number(fields["open"]),
                high=_parse_number(fields["high"]),
                low=_parse_number(fields["low"]),
                volume=_parse_volume(fields["volume"]),
                change_pct=_parse_percent(fields["change_pct"]),
            )
        except (ValueError, IndexError):
            rejected.append(rownum)
            continue
        if day in bars:
            raise ParseError(f"{symbol}: duplicate date {day.isoformat()}")
        bars[day] = PriceBar(date=day, **values)

    if len(bars) < 2:
        raise InsufficientDataError(
            f"{symbol}: need at least 2 valid rows, got {len(bars)}"
        )
    ordered = tuple(bars[d] for d in sorted(bars))
    return PriceSeries(symbol=symbol, bars=ordered, rejected_rows=tuple(rejected))


def load_price_csv(path: str | Path, symbol: str | None = None) -> PriceSeries:
    """Read a CSV file; the symbol defaults to the file stem."""
    path = Path(path)
    raw = path.read_text(encoding="utf-8")
    return parse_price_csv(raw, symbol or path.stem)


def format_price_csv(series: PriceSeries) -> str:
    """Serialize ``series`` in the investing.com column layout.

    Floats are written with ``repr`` so that parsing the output reproduces
    the series exactly.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_ALL, lineterminator="\n")
    writer.writerow(["Date", "Price", "Open", "High", "Low", "Vol.", "Change %"])
    for bar in reversed(series.bars):
        writer.writerow([
            bar.date.isoformat(),
            repr(bar.close),
            repr(bar.open),
            repr(bar.high),
            repr(bar.low),
            str(bar.volume),
            f"{bar.change_pct!r}%",
        ])
    return buf.getvalue()
