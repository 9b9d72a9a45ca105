import numpy as np
import pytest

from stylized_facts.errors import InvalidParameterError
from stylized_facts.garch import GarchSpec
from stylized_facts.ingestion import format_price_csv, parse_price_csv
from stylized_facts.returns import log_returns
from stylized_facts.synth import GeneratorSpec, generate, make_rng, prices_from_returns

N = 100_000


def test_gaussian_variance():
    x = generate(GeneratorSpec("gaussian_wn", N, 1, {"sigma": 1.0}))
    assert abs(x.var() - 1.0) <= 0.02


def test_pareto_support_and_survival():
    x = generate(GeneratorSpec("pareto", N, 2, {"alpha": 3.0, "x_min": 1.0}))
    assert x.min() >= 1.0
    assert abs(np.mean(x > 2.0) - 0.125) <= 0.01


@pytest.mark.parametrize("kind, params", [
    ("gaussian_wn", {"sigma": 2.0}),
    ("student_t", {"nu": 3}),
    ("pareto", {"alpha": 3.0}),
    ("ar1", {"phi": 0.5, "sigma": 1.0}),
    ("garch", {"spec": GarchSpec(1, 1, 0.1, (0.1,), (0.8,))}),
])
def test_deterministic(kind, params):
    a = generate(GeneratorSpec(kind, 500, 42, params))
    b = generate(GeneratorSpec(kind, 500, 42, params))
    c = generate(GeneratorSpec(kind, 500, 43, params))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("kind, params, mean, var", [
    ("gaussian_wn", {"sigma": 2.0}, 0.0, 4.0),
    ("student_t", {"nu": 5}, 0.0, 5 / 3),
    ("ar1", {"phi": 0.5, "sigma": 1.0}, 0.0, 1 / 0.75),
    ("pareto", {"alpha": 5.0, "x_min": 1.0}, 1.25, 5 / (16 * 3)),
])
def test_first_two_moments(kind, params, mean, var):
    # 3-sigma bands at n = 1e5; the AR(1) band is widened by its long-run variance
    x = generate(GeneratorSpec(kind, N, 3, params))
    inflation = (1 + 0.5) / (1 - 0.5) if kind == "ar1" else 1.0
    assert abs(x.mean() - mean) < 3 * np.sqrt(var * inflation / N)
    # fourth moments: normal 3 var^2, t5 uses kurtosis 9, pareto(5) has 4th moment 5
    fourth = {"gaussian_wn": 3 * var**2, "student_t": 9 * var**2,
              "ar1": 3 * var**2 * (1 + 0.25) / (1 - 0.25), "pareto": None}[kind]
    if fourth is not None:
        assert abs(x.var() - var) < 3 * np.sqrt((fourth - var**2) / N)


@pytest.mark.parametrize("kind, params", [
    ("student_t", {"nu": 0}),
    ("pareto", {"alpha": -1}),
    ("ar1", {"phi": 1.0}),
    ("garch", {}),
    ("cauchy", {}),
])
def test_invalid_specs(kind, params):
    with pytest.raises(InvalidParameterError):
        GeneratorSpec(kind, 10, 0, params)


def test_streams_are_independent():
    a = make_rng(5, 0).standard_normal(10)
    b = make_rng(5, 1).standard_normal(10)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, make_rng(5, 0).standard_normal(10))


def test_prices_from_returns_round_trip():
    r = generate(GeneratorSpec("student_t", 300, 4, {"nu": 4})) * 0.01
    series = prices_from_returns(r, "SYN")
    np.testing.assert_allclose(log_returns(series).values, r, atol=1e-12)
    assert parse_price_csv(format_price_csv(series), "SYN") == series
    assert all(b.date.weekday() < 5 for b in series.bars)
