"""Hill tail-index estimation with Hill-plot-stability threshold selection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DegenerateInputError, InsufficientDataError, InvalidParameterError

__all__ = [
    "TailIndexEstimate",
    "SIDES",
    "tail_sample",
    "hill_path",
    "hill_estimate",
    "adaptive_hill",
    "adaptive_k_range",
    "classify_tail",
    "ADAPTIVE_MIN_N",
]

SIDES = ("upper", "lower", "both_abs")
ADAPTIVE_MIN_N = 100


@dataclass(frozen=True)
class TailIndexEstimate:
    """Hill estimate ``xi`` of the tail parameter and its inverse ``alpha``.

    ``k`` is the number of upper order statistics used out of the
    ``n_tail_sample`` positive values left after the side transform.
    """

    xi: float
    alpha: float
    k: int
    n_tail_sample: int
    std_error: float
    side: str
    k_selection: str = "fixed"


def tail_sample(values, side: str = "both_abs") -> np.ndarray:
    """Positive values after the side transform, sorted in descending order."""
    x = np.asarray(getattr(values, "values", values), dtype=float)
    if side == "upper":
        y = x
    elif side == "lower":
        y = -x
    elif side == "both_abs":
        y = np.abs(x)
    else:
        raise InvalidParameterError(f"unknown side {side!r}; use one of {SIDES}")
    y = y[np.isfinite(y) & (y > 0)]
    return np.sort(y)[::-1]


def hill_path(sorted_desc: np.ndarray) -> np.ndarray:
    """Hill estimates for ``k = 1..n-1`` on a descending positive sample.

    Element ``k - 1`` is ``mean(log X_(1..k)) - log X_(k+1)``.
    """
    logs = np.log(sorted_desc)
    k = np.arange(1, logs.size)
    return np.cumsum(logs[:-1]) / k - logs[1:]


def _estimate(xi: float, k: int, n_tail: int, side: str, selection: str) -> TailIndexEstimate:
    if not xi > 0:
        raise DegenerateInputError(
            f"Hill estimate is {xi} at k={k}: top order statistics are all equal"
        )
    return TailIndexEstimate(
        xi=xi,
        alpha=1.0 / xi,
        k=k,
        n_tail_sample=n_tail,
        std_error=xi / math.sqrt(k),
        side=side,
        k_selection=selection,
    )


def hill_estimate(values, k: int, side: str = "both_abs") -> TailIndexEstimate:
    """Hill estimator from the ``k`` largest values.

    With descending order statistics ``X_(1) >= ... >= X_(n)``,
    ``xi = (1/k) * sum_{i<=k} log(X_(i) / X_(k+1))`` and ``alpha = 1/xi``.
    """
    y = tail_sample(values, side)
    if not 1 <= k < y.size:
        raise InsufficientDataError(
            f"Hill estimate needs 1 <= k < {y.size} positive values, got k={k}"
        )
    logs = np.log(y[: k + 1])
    xi = float(np.mean(logs[:k] - logs[k]))
    return _estimate(xi, k, y.size, side, "fixed")


def adaptive_k_range(n_tail: int) -> tuple[int, int, int]:
    """Candidate ``k`` bounds and stability-window half-width for ``n_tail``."""
    return (
        max(1, math.ceil(0.01 * n_tail)),
        min(n_tail - 1, math.floor(0.25 * n_tail)),
        math.ceil(0.02 * n_tail),
    )


def adaptive_hill(values, side: str = "both_abs") -> TailIndexEstimate:
    """Hill estimate at the most stable point of the Hill plot.

    Candidate thresholds run over ``k`` in ``[ceil(0.01 n), floor(0.25 n)]``.
    Each candidate whose centred window of ``2 * ceil(0.02 n) + 1``
    neighbouring ``k`` lies inside that range is scored by the standard
    deviation of the Hill estimates in the window; the lowest score wins,
    ties going to the smaller ``k``.
    """
    y = tail_sample(values, side)
    n = y.size
    if n < ADAPTIVE_MIN_N:
        raise InsufficientDataError(
            f"adaptive Hill needs at least {ADAPTIVE_MIN_N} positive values, got {n}"
        )
    k_lo, k_hi, half = adaptive_k_range(n)
    path = hill_path(y)[k_lo - 1 : k_hi]
    width = 2 * half + 1
    if path.size < width:
        raise InsufficientDataError("candidate k range is narrower than the stability window")
    spread = sliding_window_view(path, width).std(axis=1)
    k_star = k_lo + half + int(np.argmin(spread))
    logs = np.log(y[: k_star + 1])
    xi = float(np.mean(logs[:k_star] - logs[k_star]))
    return _estimate(xi, k_star, n, side, "adaptive_stability")


def classify_tail(estimate: TailIndexEstimate) -> str:
    """Place ``alpha`` relative to the (2, 5) heavy-tail band."""
    if estimate.alpha <= 2.0:
        return "infinite_variance"
    if estimate.alpha < 5.0:
        return "stylized_band"
    return "near_gaussian_tail"
