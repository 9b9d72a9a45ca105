"""Per-stock battery, batch orchestration and report serialization."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import dependence, garch, moments, normality, tails
from .errors import DegenerateInputError, InvalidParameterError, StylizedFactsError
from .ingestion import PriceSeries, load_price_csv
from .returns import DAILY, Frequency, log_returns

__all__ = [
    "SCHEMA_VERSION",
    "AnalysisConfig",
    "StockReport",
    "BatchReport",
    "load_config",
    "parse_config",
    "run_battery",
    "run_batch",
    "compute_tallies",
    "write_reports",
    "TAIL_HISTOGRAM_EDGES",
]

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
TAIL_HISTOGRAM_EDGES = tuple(float(e) for e in np.arange(0.0, 10.5, 0.5))
_AGG_LABELS = ("weekly", "monthly", "quarterly")


@dataclass(frozen=True)
class AnalysisConfig:
    max_lag: int = 10
    powerlaw_lag_range: tuple[int, int] = (1, 100)
    significance_levels: tuple[float, ...] = (0.01, 0.05)
    garch_orders: tuple[int, int] = (1, 1)
    aggregation: tuple[int, ...] = (5, 21, 63)
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "powerlaw_lag_range", tuple(int(v) for v in self.powerlaw_lag_range))
        object.__setattr__(self, "significance_levels",
                           tuple(float(v) for v in self.significance_levels))
        object.__setattr__(self, "garch_orders", tuple(int(v) for v in self.garch_orders))
        object.__setattr__(self, "aggregation", tuple(int(v) for v in self.aggregation))
        if self.max_lag < 1:
            raise InvalidParameterError("max_lag must be positive")
        lo, hi = self.powerlaw_lag_range if len(self.powerlaw_lag_range) == 2 else (0, -1)
        if not 1 <= lo <= hi:
            raise InvalidParameterError(f"invalid powerlaw_lag_range {self.powerlaw_lag_range}")
        if not self.significance_levels or any(not 0 < a < 1 for a in self.significance_levels):
            raise InvalidParameterError("significance levels must lie in (0, 1)")
        if len(self.garch_orders) != 2:
            raise InvalidParameterError("garch_orders must be (p, q)")
        p, q = self.garch_orders
        if p < 0 or q < 1 or p + q > garch.MAX_ORDER_SUM:
            raise InvalidParameterError(f"unsupported GARCH orders p={p}, q={q}")
        if not self.aggregation or len(self.aggregation) > len(_AGG_LABELS):
            raise InvalidParameterError(f"aggregation takes 1 to {len(_AGG_LABELS)} block lengths")
        if any(b <= 1 for b in self.aggregation) or list(self.aggregation) != sorted(set(self.aggregation)):
            raise InvalidParameterError("aggregation block lengths must be increasing and > 1")
        if self.workers < 1:
            raise InvalidParameterError("workers must be at least 1")

    @property
    def frequencies(self) -> tuple[Frequency, ...]:
        return (DAILY,) + tuple(
            Frequency(label, block) for label, block in zip(_AGG_LABELS, self.aggregation)
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


_CONFIG_TYPES = {
    "max_lag": int,
    "powerlaw_lag_range": (int,),
    "significance_levels": (float,),
    "garch_orders": (int,),
    "aggregation": (int,),
    "seed": int,
    "workers": int,
}


def parse_config(text: str, base: AnalysisConfig | None = None) -> AnalysisConfig:
    """Parse ``key = value`` lines; list values are comma separated.

    Blank lines and ``#`` comments are ignored.  Unknown keys are an error.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(f"config line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        kind = _CONFIG_TYPES.get(key)
        if kind is None:
            raise InvalidParameterError(f"config line {lineno}: unknown key {key!r}")
        try:
            if isinstance(kind, tuple):
                values[key] = tuple(kind[0](v) for v in raw.split(",") if v.strip())
            else:
                values[key] = kind(raw)
        except ValueError:
            raise InvalidParameterError(f"config line {lineno}: bad value {raw!r} for {key}") from None
    return replace(base or AnalysisConfig(), **values)


def load_config(path, base: AnalysisConfig | None = None) -> AnalysisConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), base)


# -- serialization helpers -------------------------------------------------

def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _test_dict(t: dependence.HypothesisTestResult) -> dict:
    return {
        "name": t.name,
        "statistic": _num(t.statistic),
        "p_value": _num(t.p_value),
        "n": t.n,
        "params": t.params,
        "reject_at": [{"level": lvl, "reject": rej} for lvl, rej in t.reject_at],
    }


def _acf_dict(a: dependence.AcfSeries) -> dict:
    return {
        "kind": a.kind,
        "transform": a.input_transform,
        "n": a.n,
        "band": _num(a.band),
        "values": [_num(v) for v in a.values],
    }


def _tail_dict(e: tails.TailIndexEstimate) -> dict:
    return {
        "xi": _num(e.xi),
        "alpha": _num(e.alpha),
        "k": e.k,
        "n_tail_sample": e.n_tail_sample,
        "std_error": _num(e.std_error),
        "side": e.side,
        "k_selection": e.k_selection,
        "classification": tails.classify_tail(e),
    }


def _skipped(exc: Exception) -> dict:
    return {"status": "skipped", "reason": f"{type(exc).__name__}: {exc}"}


@dataclass
class StockReport:
    """Battery output for one symbol; ``sections`` is JSON-ready."""

    symbol: str
    meta: dict
    sections: dict

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "symbol": self.symbol, **self.meta,
                "sections": self.sections}

    def section(self, name: str) -> dict:
        return self.sections[name]

    def ok(self, name: str) -> bool:
        return self.sections[name]["status"] == "ok"


@dataclass
class BatchReport:
    reports: list[StockReport]
    failures: list[dict]
    tallies: dict
    config: AnalysisConfig = field(default_factory=AnalysisConfig)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "symbols": [r.symbol for r in self.reports],
            "failures": self.failures,
            "tallies": self.tallies,
            "reports": [r.to_dict() for r in self.reports],
        }


# -- the battery -----------------------------------------------------------

def _section(fn):
    try:
        out = fn()
    except StylizedFactsError as exc:
        return _skipped(exc)
    return {"status": "ok", **out}


def run_battery(prices: PriceSeries, config: AnalysisConfig | None = None) -> StockReport:
    """Run every stylized-facts check on one price series.

    Sections that fail their own preconditions are recorded as skipped
    with a reason; only an unusable return series aborts the report.
    """
    config = config or AnalysisConfig()
    levels = config.significance_levels
    r = log_returns(prices)
    if np.ptp(r.values) == 0.0:
        raise DegenerateInputError(f"{prices.symbol}: returns have zero variance")
    x = r.values
    sections: dict[str, dict] = {}

    def _moments():
        s = moments.moment_summary(x)
        return {"n": s.n, "mean": s.mean, "variance": s.variance, "skewness": s.skewness,
                "flags": {"skewness_estimator": "population_g1"}}

    def _leverage():
        c = moments.leverage_correlation(r, lag=0)
        sign = "positive" if c > 0 else "negative" if c < 0 else "zero"
        return {"lag": 0, "correlation": c, "sign": sign,
                "reverses_classical_sign": c > 0,
                "flags": {"pairing": "r_t_vs_r_t_squared",
                          "lag_choice": "contemporaneous_assumed"}}

    def _gaussianity():
        scan = normality.gaussianity_scan(r, config.frequencies, levels)
        freqs = {
            label: {"n": scan.sample_sizes[label], "ks": _test_dict(ks), "sw": _test_dict(sw),
                    "flags": scan.flags[label]}
            for label, (ks, sw) in scan.results.items()
        }
        return {"frequencies": freqs, "omitted": scan.omitted,
                "flags": {"block_lengths": {f.label: f.block_len for f in config.frequencies},
                          "ks": "parameters_estimated_no_lilliefors_correction"}}

    def _autocorrelation():
        out = {"max_lag": config.max_lag, "acf": {}, "pacf": {}}
        for transform in ("raw", "squared", "absolute"):
            out["acf"][transform] = _acf_dict(dependence.acf(x, config.max_lag, transform))
            out["pacf"][transform] = _acf_dict(dependence.pacf(x, config.max_lag, transform))
        out["flags"] = {"estimator": "moments_divisor_n_global_mean",
                        "pacf": "durbin_levinson", "band": "z_0.975/sqrt(n)"}
        return out

    def _portmanteau():
        out = {"m": config.max_lag}
        for transform in ("raw", "squared"):
            out[transform] = {
                variant: _test_dict(dependence.portmanteau(x, config.max_lag, variant,
                                                           transform, levels))
                for variant in ("ljung_box", "box_pierce")
            }
        return out

    def _clustering():
        sq = dependence.acf(x, config.max_lag, "squared")
        rows = []
        for lag in range(1, config.max_lag + 1):
            t = dependence.single_lag_test(sq.at(lag), sq.n, levels)
            rows.append({"lag": lag, "rho": sq.at(lag), "test": _test_dict(t)})
        return {"transform": "squared", "single_lag": rows,
                "lag1_positive": sq.at(1) > 0,
                "flags": {"statistic": "sqrt(n)*rho/(1-rho^2)", "null": "standard_normal"}}

    def _power_law():
        lo, hi = config.powerlaw_lag_range
        fit = dependence.fit_power_law_decay(dependence.acf(x, hi, "absolute"), lo, hi)
        return {"exponent": fit.exponent, "intercept_log": fit.intercept_log,
                "tail_index": _num(fit.tail_index), "r_squared": fit.r_squared,
                "decays": fit.decays, "lags_used": list(fit.lags_used),
                "lags_omitted": list(fit.lags_omitted),
                "flags": {"transform": "absolute", "lag_range": [lo, hi],
                          "non_positive_acf": "dropped", "regression": "ols_log_log"}}

    def _tails():
        est = tails.adaptive_hill(x, side="both_abs")
        return {**_tail_dict(est),
                "flags": {"estimator": "hill", "k_selection": "hill_plot_stability",
                          "side": "both_abs"}}

    sections["moments"] = _section(_moments)
    sections["leverage"] = _section(_leverage)
    sections["gaussianity"] = _section(_gaussianity)
    sections["autocorrelation"] = _section(_autocorrelation)
    sections["portmanteau"] = _section(_portmanteau)
    sections["volatility_clustering"] = _section(_clustering)
    sections["power_law_decay"] = _section(_power_law)
    sections["tail_index"] = _section(_tails)

    p, q = config.garch_orders
    fit = None
    try:
        fit = garch.garch_fit(x, p, q, seed=config.seed)
    except StylizedFactsError as exc:
        sections["garch"] = _skipped(exc)
    else:
        spec = fit.spec
        sections["garch"] = {
            "status": "ok", "p": p, "q": q, "omega": spec.beta0, "beta": list(spec.beta),
            "gamma": list(spec.gamma), "std_errors": [_num(s) for s in fit.std_errors],
            "mu": fit.mu, "log_likelihood": fit.log_likelihood, "converged": fit.converged,
            "iterations": fit.iterations, "persistence": spec.persistence,
            "fourth_moment_finite": spec.fourth_moment_finite(),
            "flags": {**fit.flags, "likelihood": "gaussian_quasi",
                      "optimizer": f"nelder_mead_{garch.N_STARTS}_starts",
                      "seed": config.seed},
        }

    if fit is None:
        sections["garch_residuals"] = {"status": "skipped", "reason": "garch section skipped"}
    else:
        def _residuals():
            lb, est = garch.residual_battery(fit, m=config.max_lag)
            out = {"ljung_box_squared": _test_dict(lb), "tail_index": _tail_dict(est),
                   "residual_mean": float(fit.residuals.mean()),
                   "residual_variance": float(fit.residuals.var())}
            if sections["tail_index"]["status"] == "ok":
                raw_alpha = sections["tail_index"]["alpha"]
                out["raw_vs_residual_alpha"] = {
                    "raw": raw_alpha, "residual": est.alpha,
                    "residual_minus_raw": est.alpha - raw_alpha}
            return out

        sections["garch_residuals"] = _section(_residuals)

    meta = {
        "n_prices": len(prices),
        "n_returns": len(r),
        "start_date": prices.bars[0].date.isoformat(),
        "end_date": prices.bars[-1].date.isoformat(),
        "rejected_rows": list(prices.rejected_rows),
        "config": config.to_dict(),
    }
    return StockReport(symbol=prices.symbol, meta=meta, sections=sections)


# -- batch -------------------------------------------------------------------

def _analyze_file(path: Path, config: AnalysisConfig):
    try:
        series = load_price_csv(path)
        return run_battery(series, config), None
    except (StylizedFactsError, OSError, UnicodeDecodeError) as exc:
        code = getattr(exc, "code", "io_error")
        return None, {"file": path.name, "symbol": path.stem, "code": code, "message": str(exc)}


def _reject_1pct(test: dict) -> bool:
    for entry in test["reject_at"]:
        if math.isclose(entry["level"], 0.01):
            return entry["reject"]
    return test["p_value"] < 0.01


def compute_tallies(reports: list[StockReport]) -> dict:
    """Cross-sectional counts; recomputable from the reports alone."""
    counts = {
        "n_reports": len(reports),
        "ljung_box_raw_reject_1pct": 0,
        "ljung_box_squared_reject_1pct": 0,
        "positive_skewness": 0,
        "positive_leverage": 0,
        "tail_index_in_band": 0,
    }
    raw_alphas, resid_alphas = [], []
    for rep in reports:
        s = rep.sections
        if s["portmanteau"]["status"] == "ok":
            counts["ljung_box_raw_reject_1pct"] += _reject_1pct(s["portmanteau"]["raw"]["ljung_box"])
            counts["ljung_box_squared_reject_1pct"] += _reject_1pct(
                s["portmanteau"]["squared"]["ljung_box"])
        if s["moments"]["status"] == "ok":
            counts["positive_skewness"] += s["moments"]["skewness"] > 0
        if s["leverage"]["status"] == "ok":
            counts["positive_leverage"] += s["leverage"]["correlation"] > 0
        if s["tail_index"]["status"] == "ok":
            raw_alphas.append(s["tail_index"]["alpha"])
            counts["tail_index_in_band"] += s["tail_index"]["classification"] == "stylized_band"
        if s["garch_residuals"]["status"] == "ok":
            resid_alphas.append(s["garch_residuals"]["tail_index"]["alpha"])

    edges = list(TAIL_HISTOGRAM_EDGES) + [math.inf]

    def hist(values):
        c, _ = np.histogram(values, bins=edges)
        return [int(v) for v in c]

    counts = {k: int(v) for k, v in counts.items()}
    counts["tail_index_histogram"] = {
        "edges": list(TAIL_HISTOGRAM_EDGES),
        "overflow_included_in_last": True,
        "raw": hist(raw_alphas),
        "garch_residual": hist(resid_alphas),
    }
    return counts


def run_batch(directory, config: AnalysisConfig | None = None) -> BatchReport:
    """Analyze every ``*.csv`` file in ``directory``.

    Files that fail are listed in ``failures`` and do not stop the batch.
    Reports are ordered by symbol whatever the completion order.
    """
    config = config or AnalysisConfig()
    directory = Path(directory)
    if not directory.is_dir():
        raise StylizedFactsError(f"{directory} is not a directory")
    paths = sorted(directory.glob("*.csv"))
    if config.workers > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_analyze_file, paths, [config] * len(paths)))
    else:
        outcomes = [_analyze_file(p, config) for p in paths]

    reports = [rep for rep, _ in outcomes if rep is not None]
    failures = [err for _, err in outcomes if err is not None]
    for err in failures:
        logger.warning("skipping %s: %s", err["file"], err["message"])
    if not reports:
        raise StylizedFactsError(f"no parseable CSV files in {directory}")
    reports.sort(key=lambda rep: rep.symbol)
    failures.sort(key=lambda err: err["file"])
    return BatchReport(reports=reports, failures=failures, tallies=compute_tallies(reports),
                       config=config)


# -- output files ------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v
                         for v in row])
    return buf.getvalue()


def plot_tables(batch: BatchReport) -> dict[str, str]:
    """Raw values behind the usual cross-sectional figures, as CSV text."""
    skew, lev, norm_rows, sq_rows, pacf_rows, decay, tail = [], [], [], [], [], [], []
    for rep in batch.reports:
        s, sym = rep.sections, rep.symbol
        if s["moments"]["status"] == "ok":
            skew.append((sym, s["moments"]["skewness"]))
        if s["leverage"]["status"] == "ok":
            lev.append((sym, s["leverage"]["correlation"]))
        if s["gaussianity"]["status"] == "ok":
            for label, f in s["gaussianity"]["frequencies"].items():
                norm_rows.append((sym, label, f["n"], f["ks"]["p_value"], f["sw"]["p_value"]))
        if s["volatility_clustering"]["status"] == "ok":
            for row in s["volatility_clustering"]["single_lag"]:
                sq_rows.append((sym, row["lag"], row["rho"], row["test"]["statistic"],
                                row["test"]["p_value"]))
        if s["autocorrelation"]["status"] == "ok":
            pac = s["autocorrelation"]["pacf"]["raw"]
            for lag, v in enumerate(pac["values"], start=1):
                pacf_rows.append((sym, lag, v, pac["band"]))
        if s["power_law_decay"]["status"] == "ok":
            pl = s["power_law_decay"]
            decay.append((sym, pl["exponent"], pl["tail_index"], pl["r_squared"]))
        raw_alpha = s["tail_index"].get("alpha") if s["tail_index"]["status"] == "ok" else None
        res = s["garch_residuals"]
        res_alpha = res["tail_index"]["alpha"] if res["status"] == "ok" else None
        tail.append((sym, raw_alpha, res_alpha))

    freq_order = {f.label: i for i, f in enumerate(batch.config.frequencies)}
    norm_rows.sort(key=lambda row: (freq_order.get(row[1], 99), row[0]))
    return {
        "skewness.csv": _csv_text(["symbol", "skewness"], skew),
        "leverage.csv": _csv_text(["symbol", "correlation"], lev),
        "normality_pvalues.csv": _csv_text(["symbol", "frequency", "n", "ks_p", "sw_p"], norm_rows),
        "squared_acf_pvalues.csv": _csv_text(["symbol", "lag", "rho", "statistic", "p_value"],
                                             sq_rows),
        "pacf.csv": _csv_text(["symbol", "lag", "pacf", "band"], pacf_rows),
        "acf_decay.csv": _csv_text(["symbol", "exponent", "tail_index", "r_squared"], decay),
        "tail_index.csv": _csv_text(["symbol", "raw_alpha", "garch_residual_alpha"], tail),
    }


def write_reports(batch: BatchReport, out_dir) -> list[Path]:
    """Write per-stock JSON, ``batch.json`` and ``plots/*.csv`` under ``out_dir``."""
    out = Path(out_dir)
    (out / "stocks").mkdir(parents=True, exist_ok=True)
    (out / "plots").mkdir(parents=True, exist_ok=True)
    written = []
    for rep in batch.reports:
        path = out / "stocks" / f"{rep.symbol}.json"
        path.write_text(_dump(rep.to_dict()), encoding="utf-8")
        written.append(path)
    path = out / "batch.json"
    path.write_text(_dump(batch.to_dict()), encoding="utf-8")
    written.append(path)
    for name, text in plot_tables(batch).items():
        path = out / "plots" / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
