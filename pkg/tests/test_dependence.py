import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from stylized_facts.dependence import (
    AcfSeries,
    acf,
    fit_power_law_decay,
    pacf,
    portmanteau,
    single_lag_test,
)
from stylized_facts.errors import DegenerateInputError, InsufficientDataError, InvalidParameterError
from stylized_facts.garch import GarchSpec, garch_simulate

from conftest import draw


def ljung_box_oracle(x, m):
    """Textbook Ljung-Box in plain Python floats."""
    n = len(x)
    mean = sum(x) / n
    d = [v - mean for v in x]
    c0 = sum(v * v for v in d)
    q = 0.0
    for k in range(1, m + 1):
        rk = sum(d[t] * d[t + k] for t in range(n - k)) / c0
        q += rk * rk / (n - k)
    return n * (n + 2) * q


def exact_acf(ac, n=1000):
    return AcfSeries("acf", "absolute", np.asarray(ac), n, 1.96 / math.sqrt(n))


# --- acf -------------------------------------------------------------------

def test_acf_values_start_at_lag_one():
    x = draw("gaussian_wn", 50, 0)
    a = acf(x, 5)
    assert a.values.size == 5
    assert a.lags.tolist() == [1, 2, 3, 4, 5]
    assert a.band == pytest.approx(stats.norm.ppf(0.975) / math.sqrt(50))


def test_acf_constant_series():
    with pytest.raises(DegenerateInputError):
        acf(np.ones(20), 3)


def test_acf_needs_more_points_than_lags():
    with pytest.raises(InsufficientDataError):
        acf(np.arange(5.0), 5)


def test_acf_ar1():
    x = draw("ar1", 100_000, 11, phi=0.5, sigma=1.0)
    a = acf(x, 5)
    np.testing.assert_allclose(a.values, 0.5 ** np.arange(1, 6), atol=0.02)


def test_acf_white_noise_band_calibration():
    good = 0
    for seed in range(200):
        a = acf(draw("gaussian_wn", 10_000, seed), 10)
        good += a.outside_band().size <= 2
    assert good / 200 >= 0.90


def test_acf_matches_statsmodels():
    from statsmodels.tsa.stattools import acf as sm_acf

    x = draw("student_t", 700, 5, nu=4)
    np.testing.assert_allclose(acf(x, 20).values, sm_acf(x, nlags=20, fft=False)[1:], atol=1e-12)


@given(st.lists(st.floats(-10, 10), min_size=12, max_size=80).filter(lambda v: np.std(v) > 1e-2),
       st.floats(0.1, 100).flatmap(lambda a: st.sampled_from([a, -a])),
       st.floats(-50, 50))
@settings(max_examples=80, deadline=None)
def test_acf_affine_invariant(values, a, b):
    x = np.array(values)
    np.testing.assert_allclose(acf(a * x + b, 5).values, acf(x, 5).values, atol=1e-10)


# --- pacf ------------------------------------------------------------------

def test_pacf_lag1_is_acf_lag1():
    x = draw("student_t", 400, 2, nu=5)
    assert pacf(x, 8).values[0] == acf(x, 8).values[0]


def test_pacf_ar1_cutoff():
    x = draw("ar1", 100_000, 12, phi=0.5, sigma=1.0)
    p = pacf(x, 10).values
    assert abs(p[0] - 0.5) <= 0.02
    assert np.all(np.abs(p[1:]) < 0.02)


def test_pacf_white_noise():
    good = 0
    for seed in range(200):
        p = pacf(draw("gaussian_wn", 2000, 1000 + seed), 10)
        good += (np.abs(p.values) < p.band).sum() >= 9
    assert good / 200 >= 0.90


def test_pacf_matches_statsmodels_levinson():
    from statsmodels.tsa.stattools import pacf as sm_pacf

    x = draw("ar1", 3000, 4, phi=-0.4, sigma=2.0)
    np.testing.assert_allclose(pacf(x, 12).values, sm_pacf(x, nlags=12, method="ldb")[1:],
                               atol=1e-10)


def test_pacf_singular_recursion():
    from stylized_facts.dependence import _durbin_levinson

    # not a valid (positive definite) autocorrelation sequence
    with pytest.raises(DegenerateInputError):
        _durbin_levinson(np.array([0.9, -0.9]))


# --- portmanteau ------------------------------------------------------------

def test_q_zero_when_autocorrelations_vanish():
    # zero mean, and every lag-1 and lag-2 product involves a zero
    x = np.array([1.0, 0.0, 0.0, -1.0])
    assert acf(x, 2).values.tolist() == [0.0, 0.0]
    r = portmanteau(x, m=2)
    assert r.statistic == 0.0
    assert r.p_value == 1.0


def test_ljung_box_matches_direct_oracle():
    x = draw("gaussian_wn", 200, 2024)
    r = portmanteau(x, 10, "ljung_box")
    assert r.statistic == pytest.approx(ljung_box_oracle(x.tolist(), 10), rel=1e-8)
    assert r.params == {"df": 10}
    assert r.p_value == pytest.approx(stats.chi2.sf(r.statistic, 10))


def test_box_pierce_and_ljung_box_match_statsmodels():
    from statsmodels.stats.diagnostic import acorr_ljungbox

    x = draw("ar1", 500, 9, phi=0.2, sigma=1.0)
    ref = acorr_ljungbox(x, lags=[10], boxpierce=True)
    assert portmanteau(x, 10, "ljung_box").statistic == pytest.approx(ref["lb_stat"].iloc[0], rel=1e-10)
    assert portmanteau(x, 10, "box_pierce").statistic == pytest.approx(ref["bp_stat"].iloc[0], rel=1e-10)


def test_unknown_variant():
    with pytest.raises(InvalidParameterError):
        portmanteau(draw("gaussian_wn", 50, 0), 5, "durbin_watson")


def test_ljung_box_size():
    rejections = [portmanteau(draw("gaussian_wn", 2750, s), 10).rejected(0.01) for s in range(500)]
    assert 0.003 <= np.mean(rejections) <= 0.025


def test_portmanteau_pvalues_uniform_under_null():
    p = [portmanteau(draw("gaussian_wn", 1000, 5000 + s), 10).p_value for s in range(500)]
    assert stats.kstest(p, "uniform").statistic < 0.1


@given(st.lists(st.floats(-10, 10), min_size=12, max_size=80).filter(lambda v: np.std(v) > 1e-2),
       st.integers(1, 10))
@settings(max_examples=80, deadline=None)
def test_ljung_box_dominates_box_pierce(values, m):
    x = np.array(values)
    assert portmanteau(x, m, "ljung_box").statistic >= portmanteau(x, m, "box_pierce").statistic


def test_decisions_recorded_at_both_levels():
    r = portmanteau(draw("gaussian_wn", 300, 1), 10)
    assert [lvl for lvl, _ in r.reject_at] == [0.01, 0.05]


# --- single-lag -------------------------------------------------------------

def test_single_lag_null():
    r = single_lag_test(0.0, 100)
    assert r.statistic == 0.0 and r.p_value == 1.0


def test_single_lag_value():
    r = single_lag_test(0.1, 2500)
    assert r.statistic == pytest.approx(5.050505050505051, rel=1e-12)
    assert r.p_value < 1e-6
    assert r.p_value == pytest.approx(4.406434601044703e-07, rel=1e-6)  # mpmath


def test_single_lag_odd():
    a, b = single_lag_test(0.23, 400), single_lag_test(-0.23, 400)
    assert a.statistic == -b.statistic
    assert a.p_value == b.p_value


@pytest.mark.parametrize("rho", [1.0, -1.0, 1.5])
def test_single_lag_rejects_unit_rho(rho):
    with pytest.raises(InvalidParameterError):
        single_lag_test(rho, 100)


def test_single_lag_small_n():
    with pytest.raises(InsufficientDataError):
        single_lag_test(0.1, 10)


# --- power law ---------------------------------------------------------------

def test_power_law_exact():
    lags = np.arange(1, 101)
    fit = fit_power_law_decay(exact_acf(0.5 * lags**-0.3), 1, 100)
    assert fit.exponent == pytest.approx(-0.3, abs=1e-9)
    assert fit.tail_index == pytest.approx(1 / 0.3, abs=1e-7)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.intercept_log == pytest.approx(math.log(0.5), abs=1e-9)
    assert fit.lags_used == tuple(range(1, 101))


@pytest.mark.parametrize("c", [1e-3, 0.2, 0.9])
def test_power_law_scale_free(c):
    lags = np.arange(1, 60)
    fit = fit_power_law_decay(exact_acf(c * lags**-0.25), 1, 59)
    assert fit.exponent == pytest.approx(-0.25, abs=1e-9)


@given(st.floats(0.05, 2.0), st.floats(0.01, 0.99))
@settings(max_examples=50, deadline=None)
def test_power_law_recovers_planted_exponent(beta, c):
    lags = np.arange(1, 101)
    fit = fit_power_law_decay(exact_acf(c * lags**-beta), 1, 100)
    assert fit.exponent == pytest.approx(-beta, abs=1e-9)


def test_power_law_drops_nonpositive():
    lags = np.arange(1, 11)
    ac = 0.4 * lags**-0.5
    ac[[3, 7]] = [-0.01, 0.0]
    fit = fit_power_law_decay(exact_acf(ac), 1, 10)
    assert fit.lags_omitted == (4, 8)
    assert 4 not in fit.lags_used
    assert fit.exponent == pytest.approx(-0.5, abs=1e-9)


def test_power_law_too_few_points():
    with pytest.raises(InsufficientDataError):
        fit_power_law_decay(exact_acf([0.1, -0.1, 0.05, -0.2]), 1, 4)


def test_power_law_no_decay_flag():
    lags = np.arange(1, 21)
    fit = fit_power_law_decay(exact_acf(0.01 * lags**0.2), 1, 20)
    assert not fit.decays
    assert fit.tail_index is None


def test_power_law_range_must_be_covered():
    with pytest.raises(InsufficientDataError):
        fit_power_law_decay(exact_acf(np.full(10, 0.1)), 1, 20)


def test_power_law_on_garch_absolute_returns():
    spec = GarchSpec(1, 1, 0.1, (0.15,), (0.80,))
    r = garch_simulate(spec, 100_000, 3).values
    fit = fit_power_law_decay(acf(r, 100, "absolute"), 1, 100)
    assert fit.exponent < 0
    assert fit.r_squared > 0.5
