"""Seeded synthetic generators used as ground truth for the statistics.

All randomness flows through :func:`make_rng`, which builds a counter-based
Philox generator from ``(seed, *stream)``.  Distinct stream keys give
statistically independent generators, so parallel or reordered runs draw
identical numbers for the same key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np
from scipy.signal import lfilter

from .errors import InvalidParameterError
from .ingestion import PriceBar, PriceSeries

__all__ = [
    "GeneratorSpec",
    "KINDS",
    "make_rng",
    "generate",
    "business_days",
    "prices_from_returns",
]

KINDS = ("gaussian_wn", "student_t", "pareto", "ar1", "garch")


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator for ``seed``, optionally split by integer stream keys."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class GeneratorSpec:
    """What to draw.

    ``params`` by kind: ``gaussian_wn`` sigma; ``student_t`` nu (and
    optional scale); ``pareto`` alpha, x_min; ``ar1`` phi, sigma; ``garch``
    spec (a :class:`~stylized_facts.garch.GarchSpec`) and optional burn_in.
    """

    kind: str
    n: int
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown generator kind {self.kind!r}")
        if self.n < 1:
            raise InvalidParameterError("n must be at least 1")
        p = self.params
        if self.kind == "gaussian_wn" and not p.get("sigma", 1.0) > 0:
            raise InvalidParameterError("sigma must be positive")
        if self.kind == "student_t":
            if not p.get("nu", 0) > 0:
                raise InvalidParameterError("student_t needs nu > 0")
            if not p.get("scale", 1.0) > 0:
                raise InvalidParameterError("scale must be positive")
        if self.kind == "pareto":
            if not p.get("alpha", 0) > 0:
                raise InvalidParameterError("pareto needs alpha > 0")
            if not p.get("x_min", 1.0) > 0:
                raise InvalidParameterError("pareto needs x_min > 0")
        if self.kind == "ar1":
            if not abs(p.get("phi", 1.0)) < 1:
                raise InvalidParameterError("ar1 needs |phi| < 1")
            if not p.get("sigma", 1.0) > 0:
                raise InvalidParameterError("sigma must be positive")
        if self.kind == "garch" and "spec" not in p:
            raise InvalidParameterError("garch generator needs a GarchSpec under 'spec'")


def generate(spec: GeneratorSpec) -> np.ndarray:
    p = spec.params
    n = spec.n
    if spec.kind == "garch":
        from .garch import garch_simulate

        return garch_simulate(p["spec"], n, spec.seed, p.get("burn_in", 500)).values.copy()

    rng = make_rng(spec.seed)
    if spec.kind == "gaussian_wn":
        return p.get("sigma", 1.0) * rng.standard_normal(n)
    if spec.kind == "student_t":
        return p.get("scale", 1.0) * rng.standard_t(p["nu"], n)
    if spec.kind == "pareto":
        # 1 - U lies in (0, 1], so the power is always finite
        u = 1.0 - rng.random(n)
        return p.get("x_min", 1.0) * u ** (-1.0 / p["alpha"])
    # ar1, started from its stationary distribution
    phi, sigma = p["phi"], p.get("sigma", 1.0)
    x0 = rng.standard_normal() * sigma / math.sqrt(1.0 - phi**2)
    e = sigma * rng.standard_normal(n)
    y, _ = lfilter([1.0], [1.0, -phi], e, zi=[phi * x0])
    return y


def business_days(start: date, count: int) -> list[date]:
    """``count`` consecutive weekdays starting on or after ``start``."""
    out = []
    day = start
    while len(out) < count:
        if day.weekday() < 5:
            out.append(day)
        day += timedelta(days=1)
    return out


def prices_from_returns(returns, symbol: str, start: date = date(2007, 1, 1),
                        start_price: float = 100.0, seed: int = 0) -> PriceSeries:
    """Build a plausible OHLCV series whose close-to-close log returns are ``returns``.

    Open is the previous close; high and low widen the open/close range by
    a small random margin.
    """
    r = np.asarray(returns, dtype=float)
    closes = start_price * np.exp(np.concatenate([[0.0], np.cumsum(r)]))
    rng = make_rng(seed, 1)
    wiggle = rng.uniform(0.0, 0.01, size=(closes.size, 2))
    volume = rng.integers(10_000, 5_000_000, size=closes.size)
    days = business_days(start, closes.size)
    bars = []
    prev = closes[0]
    for i, close in enumerate(closes):
        c, o = float(close), float(prev)
        hi = max(o, c) * (1.0 + wiggle[i, 0])
        lo = min(o, c) * (1.0 - wiggle[i, 1])
        chg = 0.0 if i == 0 else round(100.0 * (c / bars[-1].close - 1.0), 2)
        bars.append(PriceBar(days[i], c, o, hi, lo, int(volume[i]), chg))
        prev = close
    return PriceSeries(symbol=symbol, bars=tuple(bars))
