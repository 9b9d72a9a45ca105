"""Stylized-facts battery for daily stock returns."""

from .dependence import (
    AcfSeries,
    HypothesisTestResult,
    PowerLawFit,
    acf,
    fit_power_law_decay,
    pacf,
    portmanteau,
    single_lag_test,
)
from .errors import (
    DegenerateInputError,
    InsufficientDataError,
    InvalidParameterError,
    ParseError,
    StylizedFactsError,
)
from .garch import GarchFit, GarchSpec, garch_fit, garch_simulate, residual_battery
from .ingestion import PriceBar, PriceSeries, format_price_csv, load_price_csv, parse_price_csv
from .moments import MomentSummary, leverage_correlation, moment_summary
from .normality import GaussianityScan, gaussianity_scan, ks_normal_test, shapiro_wilk
from .report import AnalysisConfig, BatchReport, StockReport, run_batch, run_battery, write_reports
from .returns import Frequency, ReturnSeries, aggregate, log_returns
from .synth import GeneratorSpec, generate, make_rng
from .tails import TailIndexEstimate, adaptive_hill, classify_tail, hill_estimate

__version__ = "0.1.0"
