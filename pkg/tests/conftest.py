import numpy as np
import pytest

from stylized_facts.garch import GarchSpec
from stylized_facts.returns import DAILY, ReturnSeries
from stylized_facts.synth import GeneratorSpec, generate


def draw(kind, n, seed, **params):
    return generate(GeneratorSpec(kind, n, seed, params))


def daily(values, symbol="X"):
    return ReturnSeries(symbol=symbol, frequency=DAILY, values=np.asarray(values, dtype=float))


@pytest.fixture
def garch11():
    return GarchSpec(p=1, q=1, beta0=0.1, beta=(0.1,), gamma=(0.8,))


def write_corpus(directory, n_planted=25, n_iid=25, n_days=2750):
    """Price CSVs: ``n_planted`` GARCH(1,1) stocks then ``n_iid`` Gaussian ones.

    Returns the symbols that carry planted squared-return autocorrelation.
    """
    from stylized_facts.ingestion import format_price_csv
    from stylized_facts.synth import prices_from_returns

    spec = GarchSpec(p=1, q=1, beta0=0.05, beta=(0.1,), gamma=(0.85,))
    planted = []
    for i in range(n_planted + n_iid):
        if i < n_planted:
            sym = f"G{i:02d}"
            r = draw("garch", n_days, 1000 + i, spec=spec) / 100.0
            planted.append(sym)
        else:
            sym = f"W{i:02d}"
            r = draw("gaussian_wn", n_days, 1000 + i, sigma=0.01)
        series = prices_from_returns(r, sym, seed=i)
        (directory / f"{sym}.csv").write_text(format_price_csv(series), encoding="utf-8")
    return planted
