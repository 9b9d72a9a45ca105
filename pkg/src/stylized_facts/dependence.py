"""Serial dependence: ACF, PACF, portmanteau tests and ACF power-law decay."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DegenerateInputError, InsufficientDataError, InvalidParameterError

__all__ = [
    "AcfSeries",
    "HypothesisTestResult",
    "PowerLawFit",
    "DEFAULT_LEVELS",
    "make_test_result",
    "transform_values",
    "autocovariance",
    "acf",
    "pacf",
    "portmanteau",
    "single_lag_test",
    "fit_power_law_decay",
]

DEFAULT_LEVELS = (0.01, 0.05)
_TRANSFORMS = ("raw", "squared", "absolute")
_Z975 = float(stats.norm.ppf(0.975))


@dataclass(frozen=True)
class HypothesisTestResult:
    """Outcome of a test against a known null distribution.

    ``params`` holds the null-distribution parameters (degrees of freedom
    for chi-square tests, empty for standard-normal ones).  ``reject_at``
    pairs each significance level with the decision at that level.
    """

    name: str
    statistic: float
    p_value: float
    n: int
    params: dict = field(default_factory=dict)
    reject_at: tuple[tuple[float, bool], ...] = ()

    def __post_init__(self):
        if not np.isfinite(self.statistic):
            raise DegenerateInputError(f"{self.name}: non-finite statistic")
        p = float(min(max(self.p_value, 0.0), 1.0))
        object.__setattr__(self, "p_value", p)

    def rejected(self, level: float) -> bool:
        for lvl, decision in self.reject_at:
            if np.isclose(lvl, level):
                return decision
        return self.p_value < level


def _decisions(p_value: float, levels) -> tuple[tuple[float, bool], ...]:
    return tuple((float(lvl), bool(p_value < lvl)) for lvl in levels)


def make_test_result(name, statistic, p_value, n, params=None, levels=DEFAULT_LEVELS):
    """Build a :class:`HypothesisTestResult` with decisions at ``levels``."""
    p_value = float(min(max(p_value, 0.0), 1.0))
    return HypothesisTestResult(
        name=name,
        statistic=float(statistic),
        p_value=p_value,
        n=int(n),
        params=dict(params or {}),
        reject_at=_decisions(p_value, levels),
    )


@dataclass(frozen=True, eq=False)
class AcfSeries:
    """ACF or PACF values at lags ``1..len(values)``.

    ``band`` is the half-width of the approximate 95% white-noise
    confidence band, ``z_{0.975} / sqrt(n)``.
    """

    kind: str
    input_transform: str
    values: np.ndarray
    n: int
    band: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def lags(self) -> np.ndarray:
        return np.arange(1, self.values.size + 1)

    @property
    def max_lag(self) -> int:
        return int(self.values.size)

    def at(self, lag: int) -> float:
        return float(self.values[lag - 1])

    def outside_band(self) -> np.ndarray:
        """Lags whose value lies outside the confidence band."""
        return self.lags[np.abs(self.values) > self.band]


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit of ``log(ac) = exponent * log(lag) + intercept_log``.

    ``tail_index`` is ``-1 / exponent`` and is ``None`` when the fitted
    slope is non-negative (no decay detected).
    """

    exponent: float
    intercept_log: float
    tail_index: float | None
    r_squared: float
    lags_used: tuple[int, ...]
    lags_omitted: tuple[int, ...] = ()

    @property
    def decays(self) -> bool:
        return self.exponent < 0


def transform_values(values, transform: str = "raw") -> np.ndarray:
    x = np.asarray(getattr(values, "values", values), dtype=float)
    if transform == "raw":
        return x
    if transform == "squared":
        return x**2
    if transform == "absolute":
        return np.abs(x)
    raise InvalidParameterError(f"unknown transform {transform!r}; use one of {_TRANSFORMS}")


def _check_lag(x: np.ndarray, max_lag: int) -> None:
    if max_lag < 1:
        raise InvalidParameterError("max_lag must be at least 1")
    if x.size <= max_lag:
        raise InsufficientDataError(
            f"need more than {max_lag} observations for lag {max_lag}, got {x.size}"
        )


def autocovariance(values, max_lag: int) -> np.ndarray:
    """Sample autocovariances at lags ``0..max_lag``, divisor ``n``."""
    x = np.asarray(values, dtype=float)
    _check_lag(x, max_lag)
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("autocovariance of a constant series is degenerate")
    n = x.size
    d = x - x.mean()
    return np.array([np.dot(d[: n - k], d[k:]) / n for k in range(max_lag + 1)])


def acf(values, max_lag: int, transform: str = "raw") -> AcfSeries:
    """Method-of-moments autocorrelation at lags ``1..max_lag``.

    Uses the global sample mean and the divisor-``n`` autocovariance, so
    the implied autocovariance sequence is positive semidefinite.
    """
    x = transform_values(values, transform)
    gamma = autocovariance(x, max_lag)
    rho = np.clip(gamma[1:] / gamma[0], -1.0, 1.0)
    return AcfSeries(
        kind="acf",
        input_transform=transform,
        values=rho,
        n=x.size,
        band=_Z975 / np.sqrt(x.size),
    )


def _durbin_levinson(rho: np.ndarray) -> np.ndarray:
    m = rho.size
    out = np.empty(m)
    out[0] = rho[0]
    phi = np.array([rho[0]])
    v = 1.0 - rho[0] ** 2
    if abs(rho[0]) >= 1.0 or v <= 0.0:
        raise DegenerateInputError("Durbin-Levinson recursion is singular at lag 1")
    for k in range(2, m + 1):
        num = rho[k - 1] - np.dot(phi, rho[k - 2 :: -1][: k - 1])
        phi_kk = num / v
        if not abs(phi_kk) < 1.0:
            raise DegenerateInputError(f"Durbin-Levinson recursion is singular at lag {k}")
        phi = np.append(phi - phi_kk * phi[::-1], phi_kk)
        v *= 1.0 - phi_kk**2
        out[k - 1] = phi_kk
    return out


def pacf(values, max_lag: int, transform: str = "raw") -> AcfSeries:
    """Partial autocorrelation from the sample ACF via Durbin-Levinson.

    The lag-1 value is the lag-1 autocorrelation itself.
    """
    rho = acf(values, max_lag, transform)
    return AcfSeries(
        kind="pacf",
        input_transform=transform,
        values=_durbin_levinson(rho.values),
        n=rho.n,
        band=rho.band,
    )


def portmanteau(values, m: int = 10, variant: str = "ljung_box", transform: str = "raw",
                levels=DEFAULT_LEVELS) -> HypothesisTestResult:
    """Ljung-Box or Box-Pierce test that the first ``m`` autocorrelations vanish.

    Ljung-Box uses ``Q = n (n + 2) sum_k rho_k**2 / (n - k)``, Box-Pierce
    ``Q = n sum_k rho_k**2``; both are referred to chi-square with ``m``
    degrees of freedom.
    """
    rho = acf(values, m, transform)
    n = rho.n
    r2 = rho.values**2
    if variant == "ljung_box":
        q = n * (n + 2) * np.sum(r2 / (n - np.arange(1, m + 1)))
    elif variant == "box_pierce":
        q = n * np.sum(r2)
    else:
        raise InvalidParameterError(f"unknown portmanteau variant {variant!r}")
    return make_test_result(variant, q, stats.chi2.sf(q, m), n, {"df": m}, levels)


def single_lag_test(rho_hat: float, n: int, levels=DEFAULT_LEVELS) -> HypothesisTestResult:
    """Two-sided test of one autocorrelation via ``X = sqrt(n) rho / (1 - rho**2)``.

    ``X`` is referred to the standard normal.
    """
    if not abs(rho_hat) < 1.0:
        raise InvalidParameterError(f"|rho_hat| must be < 1, got {rho_hat}")
    if n < 30:
        raise InsufficientDataError(f"single-lag test needs n >= 30, got {n}")
    x = np.sqrt(n) * rho_hat / (1.0 - rho_hat**2)
    return make_test_result("single_lag", x, 2.0 * stats.norm.sf(abs(x)), n, {}, levels)


def fit_power_law_decay(acf_series: AcfSeries, lag_min: int = 1,
                        lag_max: int = 100) -> PowerLawFit:
    """OLS fit of log ACF against log lag over ``lag_min..lag_max``.

    Lags with non-positive ACF cannot be log-transformed; they are left out
    of the fit and reported in ``lags_omitted``.
    """
    if not 1 <= lag_min <= lag_max:
        raise InvalidParameterError(f"invalid lag range [{lag_min}, {lag_max}]")
    if lag_max > acf_series.max_lag:
        raise InsufficientDataError(
            f"ACF covers lags up to {acf_series.max_lag}, fit needs {lag_max}"
        )
    lags = np.arange(lag_min, lag_max + 1)
    ac = acf_series.values[lag_min - 1 : lag_max]
    keep = ac > 0
    if keep.sum() < 3:
        raise InsufficientDataError("power-law fit needs at least 3 positive ACF values")
    x = np.log(lags[keep])
    y = np.log(ac[keep])
    xc = x - x.mean()
    yc = y - y.mean()
    slope = float(np.dot(xc, yc) / np.dot(xc, xc))
    intercept = float(y.mean() - slope * x.mean())
    ss_tot = float(np.dot(yc, yc))
    resid = yc - slope * xc
    ss_res = float(np.dot(resid, resid))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(
        exponent=slope,
        intercept_log=intercept,
        tail_index=-1.0 / slope if slope < 0 else None,
        r_squared=float(np.clip(r2, 0.0, 1.0)),
        lags_used=tuple(int(l) for l in lags[keep]),
        lags_omitted=tuple(int(l) for l in lags[~keep]),
    )
