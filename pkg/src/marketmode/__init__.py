"""Market-mode co-movement and multifractal random walk analytics.

Pipeline: minute bars -> de-seasonalized log-return panel -> windowed
correlation matrices and their market mode -> sliding MRW estimation of
the log-volatility variance ``lambda2 * log(L/dt)`` around crash dates.
"""

from marketmode.comovement import (
    PER_DAY,
    SLIDING,
    CorrelationSnapshot,
    EigenSolverError,
    MarketModeSeries,
    NormalizedWindow,
    acf,
    ccf,
    correlation_matrix,
    market_mode,
    market_mode_series,
    max_eigenpair,
    normalize_window,
    rolling_eigenvalues,
    WindowScheme,
)
from marketmode.mrw import (
    LogAbsCovariance,
    MomentScaling,
    MrwFitError,
    MrwParams,
    MrwPath,
    estimate_params,
    fit_zeta,
    log_abs_cov,
    moment_scaling,
    omega_covariance,
    pool_scaling,
    rho,
    simulate,
    volatility_log_variance,
    zeta_model,
)
from marketmode.panel import (
    GridSpec,
    PanelError,
    PricePanel,
    ReturnPanel,
    SeasonalProfile,
    build_seasonal_profile,
    deseasonalize,
    load_panel,
    log_returns,
)
from marketmode.precursor import (
    CrashEvent,
    IndicatorSeries,
    SlidingConfig,
    align_events,
    label_crashes,
    sliding_indicator,
)

__version__ = "0.1.0"

__all__ = [
    "CorrelationSnapshot",
    "CrashEvent",
    "EigenSolverError",
    "GridSpec",
    "IndicatorSeries",
    "LogAbsCovariance",
    "MarketModeSeries",
    "MomentScaling",
    "MrwFitError",
    "MrwParams",
    "MrwPath",
    "NormalizedWindow",
    "PER_DAY",
    "PanelError",
    "PricePanel",
    "ReturnPanel",
    "SLIDING",
    "SeasonalProfile",
    "SlidingConfig",
    "WindowScheme",
    "acf",
    "align_events",
    "build_seasonal_profile",
    "ccf",
    "correlation_matrix",
    "deseasonalize",
    "estimate_params",
    "fit_zeta",
    "label_crashes",
    "load_panel",
    "log_abs_cov",
    "log_returns",
    "market_mode",
    "market_mode_series",
    "max_eigenpair",
    "moment_scaling",
    "normalize_window",
    "omega_covariance",
    "pool_scaling",
    "rho",
    "rolling_eigenvalues",
    "simulate",
    "sliding_indicator",
    "volatility_log_variance",
    "zeta_model",
]
