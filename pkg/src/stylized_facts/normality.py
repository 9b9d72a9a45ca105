"""Normality tests and the aggregational-Gaussianity scan."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .dependence import DEFAULT_LEVELS, HypothesisTestResult, make_test_result
from .errors import DegenerateInputError, InsufficientDataError
from .returns import STANDARD_FREQUENCIES, Frequency, ReturnSeries, aggregate

__all__ = [
    "GaussianityScan",
    "ks_normal_test",
    "shapiro_wilk",
    "gaussianity_scan",
    "MIN_SCAN_SIZE",
    "SW_MAX_N",
]

MIN_SCAN_SIZE = 8
SW_MAX_N = 5000


def ks_normal_test(values, levels=DEFAULT_LEVELS) -> HypothesisTestResult:
    """One-sample Kolmogorov-Smirnov test against N(0, 1) after standardizing.

    The sample is standardized by its own mean and (n - 1) standard
    deviation and compared with the standard normal.  The p-value comes from
    the asymptotic Kolmogorov distribution with no Lilliefors correction, so
    it is conservative when the parameters were estimated.
    """
    x = np.asarray(getattr(values, "values", values), dtype=float)
    n = x.size
    if n < MIN_SCAN_SIZE:
        raise InsufficientDataError(f"KS test needs at least {MIN_SCAN_SIZE} values, got {n}")
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("KS test is undefined for zero-variance input")
    z = np.sort((x - x.mean()) / x.std(ddof=1))
    cdf = stats.norm.cdf(z)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))
    p = float(stats.kstwobign.sf(np.sqrt(n) * d))
    return make_test_result("ks_normal", d, p, n, {"estimated": ["mean", "sd"]}, levels)


def shapiro_wilk(values, levels=DEFAULT_LEVELS) -> HypothesisTestResult:
    """Shapiro-Wilk W test with Royston's approximation to the null.

    Valid for ``3 <= n <= 5000``.
    """
    x = np.asarray(getattr(values, "values", values), dtype=float)
    n = x.size
    if not 3 <= n <= SW_MAX_N:
        raise InsufficientDataError(f"Shapiro-Wilk needs 3 <= n <= {SW_MAX_N}, got {n}")
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("Shapiro-Wilk is undefined for zero-variance input")
    # W and its p-value depend only on the standardized order statistics;
    # standardizing first keeps the result identical under affine maps.
    z = (x - x.mean()) / x.std()
    w, p = stats.shapiro(z)
    return make_test_result("shapiro_wilk", min(float(w), 1.0), float(p), n, {}, levels)


@dataclass(frozen=True)
class GaussianityScan:
    """KS and SW results per time scale.

    ``results`` maps a frequency label to ``(ks, sw)``; scales dropped for
    lack of data appear in ``omitted`` with the reason.  ``flags`` notes
    methodology caveats such as truncation of long series for SW.
    """

    results: dict[str, tuple[HypothesisTestResult, HypothesisTestResult]]
    sample_sizes: dict[str, int]
    omitted: dict[str, str] = field(default_factory=dict)
    flags: dict[str, list[str]] = field(default_factory=dict)

    @property
    def frequencies(self) -> list[str]:
        return list(self.results)


def gaussianity_scan(daily: ReturnSeries, frequencies=STANDARD_FREQUENCIES,
                     levels=DEFAULT_LEVELS) -> GaussianityScan:
    """Run both normality tests at each time scale in ``frequencies``.

    Scales whose aggregated sample has fewer than eight points are omitted
    and flagged.  Raises if even the shortest aggregation above daily is
    too small.
    """
    freqs: list[Frequency] = sorted(frequencies, key=lambda f: f.block_len)
    coarse = [f for f in freqs if f.block_len > 1]
    shortest = coarse[0].block_len if coarse else 1
    if len(daily) < MIN_SCAN_SIZE * shortest:
        raise InsufficientDataError(
            f"{daily.symbol}: {len(daily)} daily returns is too short for the "
            f"Gaussianity scan (need {MIN_SCAN_SIZE * shortest})"
        )
    results, sizes, omitted, flags = {}, {}, {}, {}
    for freq in freqs:
        n_freq = len(daily) // freq.block_len
        if n_freq < MIN_SCAN_SIZE:
            omitted[freq.label] = (
                f"only {n_freq} {freq.label} returns; need {MIN_SCAN_SIZE}"
            )
            continue
        series = daily if freq.block_len == 1 else aggregate(daily, freq)
        x = series.values
        notes = ["ks_parameters_estimated_no_lilliefors"]
        sw_x = x
        if x.size > SW_MAX_N:
            sw_x = x[-SW_MAX_N:]
            notes.append(f"sw_truncated_to_last_{SW_MAX_N}")
        results[freq.label] = (ks_normal_test(x, levels), shapiro_wilk(sw_x, levels))
        sizes[freq.label] = int(x.size)
        flags[freq.label] = notes
    return GaussianityScan(results=results, sample_sizes=sizes, omitted=omitted, flags=flags)
