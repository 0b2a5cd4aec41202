"""Statistical property metrics used to profile datasets and explain routing."""

from .adf import ADFResult, adf_test, schwert_lags, tau_pvalue
from .properties import (
    DecompositionResult,
    DegenerateSeriesError,
    ProfileConfig,
    PropertyProfile,
    autocorrelation,
    compute_seasonality,
    compute_shifting,
    compute_stationarity,
    compute_transition,
    compute_trend,
    decompose,
    estimate_period,
    first_zero_acf,
    profile,
    profile_windows,
)

__all__ = [
    "ADFResult",
    "DecompositionResult",
    "DegenerateSeriesError",
    "ProfileConfig",
    "PropertyProfile",
    "adf_test",
    "autocorrelation",
    "compute_seasonality",
    "compute_shifting",
    "compute_stationarity",
    "compute_transition",
    "compute_trend",
    "decompose",
    "estimate_period",
    "first_zero_acf",
    "profile",
    "profile_windows",
    "schwert_lags",
    "tau_pvalue",
]
