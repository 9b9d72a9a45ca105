"""Sample moments and the return/volatility (leverage) correlation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InsufficientDataError, InvalidParameterError
from .returns import ReturnSeries

__all__ = ["MomentSummary", "moment_summary", "leverage_correlation"]


@dataclass(frozen=True)
class MomentSummary:
    n: int
    mean: float
    variance: float
    skewness: float


def moment_summary(values) -> MomentSummary:
    """Mean, population variance and g1 skewness of a sample.

    Skewness is ``m3 / m2**1.5`` with central moments
    ``m_k = mean((x - mean(x))**k)``, i.e. without the small-sample
    correction.
    """
    x = np.asarray(getattr(values, "values", values), dtype=float)
    n = x.size
    if n < 3:
        raise InsufficientDataError(f"skewness needs at least 3 values, got {n}")
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("skewness is undefined for zero-variance input")
    mean = float(x.mean())
    dev = x - mean
    m2 = float(np.mean(dev**2))
    m3 = float(np.mean(dev**3))
    return MomentSummary(n=n, mean=mean, variance=m2, skewness=m3 / m2**1.5)


def leverage_correlation(returns: ReturnSeries, lag: int = 0) -> float:
    """Pearson correlation between ``r_t`` and ``r_{t+lag}**2``.

    ``lag=0`` gives the contemporaneous correlation between returns and
    squared returns; a positive lag correlates today's return with later
    squared returns.
    """
    r = np.asarray(getattr(returns, "values", returns), dtype=float)
    if lag < 0:
        raise InvalidParameterError("lag must be non-negative")
    if r.size <= lag + 2:
        raise InsufficientDataError(
            f"leverage correlation at lag {lag} needs more than {lag + 2} returns"
        )
    lead = r[: r.size - lag]
    sq = r[lag:] ** 2
    if np.ptp(lead) == 0.0 or np.ptp(sq) == 0.0:
        raise DegenerateInputError("leverage correlation is undefined: zero variance")
    # rescale both sides so tiny inputs do not underflow in the products
    lead = lead / np.max(np.abs(lead))
    sq = sq / np.max(sq)
    a = lead - lead.mean()
    b = sq - sq.mean()
    corr = float(np.dot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.clip(corr, -1.0, 1.0))
