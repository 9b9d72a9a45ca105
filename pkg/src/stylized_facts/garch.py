"""GARCH(p, q) simulation and Gaussian quasi-maximum-likelihood fitting.

Variance equation, with ``eps_t = sigma_t * W_t``::

    sigma2_t = omega + sum_i beta_i * eps2_{t-i} + sum_j gamma_j * sigma2_{t-j}

``beta`` holds the ``q`` ARCH coefficients and ``gamma`` the ``p`` GARCH
coefficients.  Fitting works on transformed parameters so that every
optimizer step stays inside ``omega > 0``, coefficients ``>= 0`` and
``sum(beta) + sum(gamma) < 1``: ``log(omega)``, the logit of the total
persistence and softmax logits splitting that persistence across lags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.optimize import minimize
from scipy.special import logit

from .dependence import HypothesisTestResult, portmanteau
from .errors import (
    DegenerateInputError,
    InsufficientDataError,
    InvalidParameterError,
    StylizedFactsError,
)
from .returns import DAILY, ReturnSeries
from .synth import make_rng
from .tails import TailIndexEstimate, adaptive_hill

__all__ = [
    "GarchSpec",
    "GarchFit",
    "conditional_variance",
    "garch_loglik",
    "garch_simulate",
    "garch_fit",
    "residual_battery",
    "MIN_FIT_LENGTH",
    "LL_TOL",
]

MIN_FIT_LENGTH = 250
MAX_ORDER_SUM = 4
LL_TOL = 1e-8
N_STARTS = 5
_MAX_POLISH = 25
_NM_MAXITER = 2000


@dataclass(frozen=True)
class GarchSpec:
    """GARCH(p, q) coefficients: ``beta0`` is the constant ``omega``."""

    p: int
    q: int
    beta0: float
    beta: tuple[float, ...]
    gamma: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        if self.q < 1 or self.p < 0:
            raise InvalidParameterError(f"need q >= 1 and p >= 0, got p={self.p}, q={self.q}")
        if len(self.beta) != self.q or len(self.gamma) != self.p:
            raise InvalidParameterError("coefficient counts do not match the orders")
        if not self.beta0 > 0:
            raise InvalidParameterError(f"beta0 must be positive, got {self.beta0}")
        if any(not c >= 0 for c in self.beta + self.gamma):
            raise InvalidParameterError("ARCH and GARCH coefficients must be non-negative")
        if not self.persistence < 1:
            raise InvalidParameterError(
                f"stationarity needs sum(beta) + sum(gamma) < 1, got {self.persistence}"
            )

    @property
    def persistence(self) -> float:
        return float(sum(self.beta) + sum(self.gamma))

    @property
    def unconditional_variance(self) -> float:
        return self.beta0 / (1.0 - self.persistence)

    @property
    def params(self) -> np.ndarray:
        """Coefficients in the order ``(omega, beta_1..q, gamma_1..p)``."""
        return np.array((self.beta0, *self.beta, *self.gamma))

    @classmethod
    def from_params(cls, p: int, q: int, params) -> "GarchSpec":
        params = [float(v) for v in params]
        return cls(p=p, q=q, beta0=params[0], beta=tuple(params[1 : q + 1]),
                   gamma=tuple(params[q + 1 :]))

    def fourth_moment_finite(self) -> bool | None:
        """Finite-fourth-moment condition where a closed form is at hand.

        ARCH(1) needs ``beta_1 < 1/sqrt(3)``; GARCH(1,1) needs
        ``3 beta_1**2 + 2 beta_1 gamma_1 + gamma_1**2 < 1``.  Other orders
        return ``None``.
        """
        if self.q == 1 and self.p == 0:
            return self.beta[0] < 1.0 / math.sqrt(3.0)
        if self.q == 1 and self.p == 1:
            b, g = self.beta[0], self.gamma[0]
            return 3 * b * b + 2 * b * g + g * g < 1.0
        return None


@dataclass(frozen=True, eq=False)
class GarchFit:
    """A fitted GARCH model and the series it was fitted to.

    ``log_likelihood`` is ``-0.5 * sum(log(sigma2_t) + eps_t**2 / sigma2_t)``,
    without the ``2 pi`` constant.  ``std_errors`` follows
    ``spec.params`` and comes from the inverse numerical Hessian; entries
    are NaN when the Hessian is not positive definite.
    """

    spec: GarchSpec
    mu: float
    cond_var: np.ndarray
    residuals: np.ndarray
    log_likelihood: float
    converged: bool
    iterations: int
    std_errors: np.ndarray
    n: int
    backcast: float
    flags: dict = field(default_factory=dict)


@njit(cache=True)
def _variance_path(eps2, omega, beta, gamma, init):
    n = eps2.size
    q = beta.size
    p = gamma.size
    sig2 = np.empty(n)
    for t in range(n):
        s = omega
        for i in range(1, q + 1):
            s += beta[i - 1] * (eps2[t - i] if t >= i else init)
        for j in range(1, p + 1):
            s += gamma[j - 1] * (sig2[t - j] if t >= j else init)
        sig2[t] = s
    return sig2


@njit(cache=True)
def _neg_loglik(eps2, omega, beta, gamma, init):
    n = eps2.size
    q = beta.size
    p = gamma.size
    sig2 = np.empty(n)
    total = 0.0
    for t in range(n):
        s = omega
        for i in range(1, q + 1):
            s += beta[i - 1] * (eps2[t - i] if t >= i else init)
        for j in range(1, p + 1):
            s += gamma[j - 1] * (sig2[t - j] if t >= j else init)
        if not s > 0.0:
            return np.inf
        sig2[t] = s
        total += math.log(s) + eps2[t] / s
    return 0.5 * total


@njit(cache=True)
def _simulate_path(w, omega, beta, gamma, init):
    n = w.size
    q = beta.size
    p = gamma.size
    eps = np.empty(n)
    sig2 = np.empty(n)
    for t in range(n):
        s = omega
        for i in range(1, q + 1):
            s += beta[i - 1] * (eps[t - i] ** 2 if t >= i else init)
        for j in range(1, p + 1):
            s += gamma[j - 1] * (sig2[t - j] if t >= j else init)
        sig2[t] = s
        eps[t] = math.sqrt(s) * w[t]
    return eps


def conditional_variance(eps, spec: GarchSpec, init: float) -> np.ndarray:
    """Variance path for mean-zero shocks ``eps``; pre-sample terms equal ``init``."""
    eps2 = np.ascontiguousarray(np.asarray(eps, dtype=float) ** 2)
    return _variance_path(eps2, spec.beta0, np.array(spec.beta), np.array(spec.gamma),
                          float(init))


def garch_loglik(eps, spec: GarchSpec, init: float) -> float:
    """Gaussian quasi-log-likelihood of mean-zero shocks, constant dropped."""
    eps2 = np.ascontiguousarray(np.asarray(eps, dtype=float) ** 2)
    nll = _neg_loglik(eps2, spec.beta0, np.array(spec.beta), np.array(spec.gamma),
                      float(init))
    return -float(nll)


def garch_simulate(spec: GarchSpec, n: int, seed: int, burn_in: int = 500,
                   symbol: str = "SIM") -> ReturnSeries:
    """Simulate ``n`` GARCH shocks driven by seeded standard-normal noise.

    The recursion starts at the unconditional variance and the first
    ``burn_in`` draws are discarded.
    """
    if not isinstance(spec, GarchSpec):
        raise InvalidParameterError("spec must be a GarchSpec")
    if n < 1 or burn_in < 0:
        raise InvalidParameterError("need n >= 1 and burn_in >= 0")
    w = make_rng(seed).standard_normal(n + burn_in)
    eps = _simulate_path(w, spec.beta0, np.array(spec.beta), np.array(spec.gamma),
                         spec.unconditional_variance)
    return ReturnSeries(symbol=symbol, frequency=DAILY, values=eps[burn_in:])


@njit(cache=True)
def _to_natural(theta, k):
    # omega, then the persistence split by softmax over (0, theta[2:])
    out = np.empty(k + 1)
    out[0] = math.exp(theta[0])
    persistence = 1.0 / (1.0 + math.exp(-theta[1]))
    top = 0.0
    for i in range(k - 1):
        top = max(top, theta[2 + i])
    total = math.exp(-top)
    for i in range(k - 1):
        total += math.exp(theta[2 + i] - top)
    out[1] = persistence * math.exp(-top) / total
    for i in range(k - 1):
        out[2 + i] = persistence * math.exp(theta[2 + i] - top) / total
    return out


@njit(cache=True)
def _theta_objective(theta, eps2, q, init):
    for v in theta:
        if not math.isfinite(v):
            return np.inf
    if abs(theta[0]) > 700.0:
        return np.inf
    v = _to_natural(theta, theta.size - 1)
    return _neg_loglik(eps2, v[0], v[1 : q + 1], v[q + 1 :], init)


def _to_theta(params: np.ndarray) -> np.ndarray:
    coeffs = np.maximum(params[1:], 1e-8)
    persistence = min(coeffs.sum(), 1.0 - 1e-8)
    logs = np.log(coeffs / coeffs.sum())
    return np.concatenate([[math.log(params[0]), logit(persistence)], logs[1:] - logs[0]])


def _start_params(p: int, q: int, variance: float) -> np.ndarray:
    if p > 0:
        arch, garch = np.full(q, 0.1 / q), np.full(p, 0.8 / p)
    else:
        arch, garch = np.full(q, 0.5 / q), np.zeros(0)
    persistence = arch.sum() + garch.sum()
    return np.concatenate([[variance * (1.0 - persistence)], arch, garch])


def _hessian(f, x: np.ndarray) -> np.ndarray:
    k = x.size
    h = np.maximum(1e-4 * np.abs(x), 1e-6)
    # keep every probe inside the non-negative quadrant
    h = np.minimum(h, np.where(x > 0, x / 3.0, h))
    hess = np.empty((k, k))
    f0 = f(x)
    for i in range(k):
        for j in range(i, k):
            if i == j:
                e = np.zeros(k)
                e[i] = h[i]
                val = (f(x + e) - 2.0 * f0 + f(x - e)) / h[i] ** 2
            else:
                ei = np.zeros(k)
                ej = np.zeros(k)
                ei[i] = h[i]
                ej[j] = h[j]
                val = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej)
                       + f(x - ei - ej)) / (4.0 * h[i] * h[j])
            hess[i, j] = hess[j, i] = val
    return hess


def _standard_errors(eps2, p: int, q: int, params: np.ndarray, init: float) -> np.ndarray:
    def nll(v):
        return _neg_loglik(eps2, v[0], v[1 : q + 1], v[q + 1 :], init)

    hess = _hessian(nll, params)
    if not np.all(np.isfinite(hess)):
        return np.full(params.size, np.nan)
    try:
        np.linalg.cholesky(hess)
    except np.linalg.LinAlgError:
        return np.full(params.size, np.nan)
    return np.sqrt(np.diag(np.linalg.inv(hess)))


def garch_fit(returns, p: int = 1, q: int = 1, seed: int = 0) -> GarchFit:
    """Fit GARCH(p, q) with a constant mean by Gaussian QMLE.

    The series is demeaned by its sample mean and the recursion is started
    (pre-sample shocks and variances) at the sample variance.  Nelder-Mead
    runs on the transformed parameters from one default and
    ``N_STARTS - 1`` jittered starting points drawn from ``seed``; the best
    solution is then re-polished until two successive passes change the
    log-likelihood by less than ``LL_TOL``.  If that does not happen within
    the pass cap the fit comes back with ``converged=False``.
    """
    x = np.asarray(getattr(returns, "values", returns), dtype=float)
    if q < 1 or p < 0 or p + q > MAX_ORDER_SUM:
        raise InvalidParameterError(f"unsupported orders p={p}, q={q}")
    if x.size < MIN_FIT_LENGTH:
        raise InsufficientDataError(
            f"GARCH fit needs at least {MIN_FIT_LENGTH} returns, got {x.size}"
        )
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("cannot fit GARCH to a constant series")

    mu = float(x.mean())
    eps = x - mu
    eps2 = np.ascontiguousarray(eps**2)
    init = float(eps2.mean())
    k = p + q

    def objective(theta):
        return _theta_objective(theta, eps2, q, init)

    rng = make_rng(seed, 7)
    base = _to_theta(_start_params(p, q, init))
    starts = [base] + [base + rng.normal(0.0, 0.5, base.size) for _ in range(N_STARTS - 1)]
    options = {"maxiter": _NM_MAXITER, "xatol": 1e-7, "fatol": 1e-10}

    best = None
    iterations = 0
    for start in starts:
        res = minimize(objective, start, method="Nelder-Mead", options=options)
        iterations += res.nit
        if best is None or res.fun < best.fun:
            best = res

    converged = False
    for _ in range(_MAX_POLISH):
        res = minimize(objective, best.x, method="Nelder-Mead", options=options)
        iterations += res.nit
        gain = best.fun - res.fun
        if res.fun < best.fun:
            best = res
        if gain < LL_TOL:
            converged = True
            break

    params = _to_natural(best.x, k)
    if not np.isfinite(best.fun):
        raise StylizedFactsError("GARCH likelihood is not finite at any start")
    try:
        spec = GarchSpec.from_params(p, q, params)
    except InvalidParameterError:
        # persistence rounded up to 1.0 in float: pull it just inside
        scaled = params.copy()
        scaled[1:] *= (1.0 - 1e-12) / scaled[1:].sum()
        spec = GarchSpec.from_params(p, q, scaled)
        converged = False
    params = spec.params

    cond_var = _variance_path(eps2, params[0], params[1 : q + 1], params[q + 1 :], init)
    flags = {
        "mean_model": "constant",
        "presample": "sample_variance",
        "fourth_moment_finite": spec.fourth_moment_finite(),
    }
    return GarchFit(
        spec=spec,
        mu=mu,
        cond_var=cond_var,
        residuals=eps / np.sqrt(cond_var),
        log_likelihood=-float(_neg_loglik(eps2, params[0], params[1 : q + 1],
                                          params[q + 1 :], init)),
        converged=converged,
        iterations=int(iterations),
        std_errors=_standard_errors(eps2, p, q, params, init),
        n=int(x.size),
        backcast=init,
        flags=flags,
    )


def residual_battery(fit: GarchFit, m: int = 10) -> tuple[HypothesisTestResult, TailIndexEstimate]:
    """Ljung-Box on squared standardized residuals and their adaptive Hill index."""
    if not fit.converged:
        raise StylizedFactsError("residual battery requires a converged GARCH fit")
    lb = portmanteau(fit.residuals, m=m, variant="ljung_box", transform="squared")
    return lb, adaptive_hill(fit.residuals, side="both_abs")
