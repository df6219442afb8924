"""Sliding-window MRW indicator, crash labelling and event alignment."""

from __future__ import annotations

import datetime as dt
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from marketmode.comovement import MarketModeSeries, parallel_map
from marketmode.mrw import MrwFitError, estimate_params, log_abs_cov


@dataclass(frozen=True)
class SlidingConfig:
    """Sliding MRW estimation settings; times are in minutes.

    ``max_lag`` defaults to the longest lag the window supports
    (``window_samples // 4 - 1``, capped at 1024) and the fit range
    to ``[fit_lo, first zero crossing)``.
    """

    window_width: float = 20_000
    step: float = 242
    delta_t: float = 5
    fit_lo: int = 10
    fit_hi: int | None = None
    max_lag: int | None = None

    def __post_init__(self):
        if not 0 < self.step <= self.window_width:
            raise ValueError(f"step must lie in (0, window_width], got {self.step}")
        if self.delta_t <= 0:
            raise ValueError("delta_t must be positive")
        lag = self.lag_cap
        if lag < self.fit_lo:
            raise ValueError(f"window of {self.window_samples} samples cannot support fit lags "
                             f"from {self.fit_lo}")
        if self.fit_hi is not None and self.fit_hi * self.delta_t >= self.window_width:
            raise ValueError("fit_hi must be shorter than the window")

    @property
    def window_samples(self) -> int:
        return int(round(self.window_width / self.delta_t))

    @property
    def lag_cap(self) -> int:
        if self.max_lag is not None:
            return self.max_lag
        return min(1024, (self.window_samples - 1) // 4)

    def n_points(self, n_samples: int) -> int:
        span = n_samples * self.delta_t - self.window_width
        if span < -1e-9:
            return 0
        return int(math.floor(span / self.step + 1e-9)) + 1


@dataclass
class IndicatorSeries:
    """``Var(omega) = lambda2 log(L/dt)`` per window; invalid windows hold NaN."""

    window_end: list
    end_index: np.ndarray
    var_omega: np.ndarray
    lambda2: np.ndarray
    L_over_dt: np.ndarray
    r2: np.ndarray
    valid: np.ndarray
    reasons: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.var_omega)


@dataclass(frozen=True)
class CrashEvent:
    date: object
    daily_return: float
    intraday_return: float
    source: str = "computed"


class EventAlignment(NamedTuple):
    date: object
    slope: float
    ascending: bool
    n_points: int


@dataclass
class AlignmentReport:
    events: list[EventAlignment]
    excluded: list[object]
    slope_window: int

    @property
    def fraction(self) -> float:
        if not self.events:
            return float("nan")
        return sum(e.ascending for e in self.events) / len(self.events)

    def to_text(self) -> str:
        lines = [f"{'date':<12} {'slope':>14} {'points':>6} ascending"]
        for e in self.events:
            lines.append(f"{str(e.date):<12} {e.slope:>14.6e} {e.n_points:>6} {'yes' if e.ascending else 'no'}")
        for d in self.excluded:
            lines.append(f"{str(d):<12} {'':>14} {'':>6} excluded (outside indicator span)")
        lines.append(f"ascending fraction = {sum(e.ascending for e in self.events)}/{len(self.events)}"
                     f" = {self.fraction:.4f}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------


def _fit_window(x: np.ndarray, cfg: SlidingConfig):
    try:
        cov = log_abs_cov(x, cfg.lag_cap)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            fit = estimate_params(cov, (cfg.fit_lo, cfg.fit_hi))
    except (MrwFitError, ValueError) as exc:
        return None, str(exc)
    if fit.diagnostics["log_L_over_dt"] < 0:
        return None, f"L/dt estimate {fit.L_over_dt:.4g} < 1 gives negative variance"
    return fit, ""


def sliding_indicator(market_mode, cfg: SlidingConfig | None = None,
                      threads: int = 1) -> IndicatorSeries:
    """Estimate ``(lambda2, L/dt)`` on windows ``[t - window_width, t]``.

    Window ``j`` ends at minute ``window_width + j * step`` of the series,
    so there are ``floor((n dt - window_width) / step) + 1`` points. Each
    window runs :func:`log_abs_cov` and :func:`estimate_params`; failed fits
    are kept as invalid points.

    Raises
    ------
    ValueError
        Series shorter than one window.
    MrwFitError
        Every window failed.
    """
    cfg = cfg or SlidingConfig()
    if isinstance(market_mode, MarketModeSeries):
        x = np.asarray(market_mode.values, dtype=float)
        stamps = list(market_mode.timestamps)
    else:
        x = np.asarray(market_mode, dtype=float)
        stamps = list(range(len(x)))
    n_pts = cfg.n_points(len(x))
    if n_pts < 1:
        raise ValueError(f"series of {len(x)} samples is shorter than one window "
                         f"({cfg.window_samples} samples)")
    w = cfg.window_samples
    stops = [min(len(x), int(math.floor((cfg.window_width + j * cfg.step) / cfg.delta_t + 1e-9)))
             for j in range(n_pts)]

    results = parallel_map(lambda stop: _fit_window(x[stop - w:stop], cfg), stops, threads)

    nan = np.full(n_pts, np.nan)
    lam2, Lr, r2, var = nan.copy(), nan.copy(), nan.copy(), nan.copy()
    valid = np.zeros(n_pts, dtype=bool)
    reasons = []
    for j, (fit, why) in enumerate(results):
        reasons.append(why)
        if fit is None:
            continue
        valid[j] = True
        lam2[j], Lr[j], r2[j] = fit.lambda2, fit.L_over_dt, fit.diagnostics["r2"]
        var[j] = fit.var_omega
    if not valid.any():
        raise MrwFitError(f"MRW fit failed in all {n_pts} windows; first reason: {reasons[0]}")
    return IndicatorSeries(window_end=[stamps[s - 1] for s in stops], end_index=np.array(stops) - 1,
                           var_omega=var, lambda2=lam2, L_over_dt=Lr, r2=r2, valid=valid,
                           reasons=reasons)


def label_crashes(daily_index, threshold: float = -0.05, basis: str = "daily") -> list[CrashEvent]:
    """Days whose log-return falls below ``threshold``.

    ``daily_index`` rows are ``(date, open, close, prev_close)``. The daily
    return is ``log(close / prev_close)``, the intraday return
    ``log(close / open)``; ``basis`` picks which one is thresholded.
    Events come back in ascending order of that return.
    """
    if basis not in ("daily", "intraday"):
        raise ValueError(f"basis must be 'daily' or 'intraday', got {basis!r}")
    events = []
    for date, open_, close, prev in daily_index:
        intraday = math.log(close / open_)
        if prev is None or not np.isfinite(prev):
            if basis == "daily":
                warnings.warn(f"{date}: no previous close, row skipped", RuntimeWarning, stacklevel=2)
                continue
            daily = float("nan")
        else:
            daily = math.log(close / prev)
        key = daily if basis == "daily" else intraday
        if key < threshold:
            events.append(CrashEvent(date=date, daily_return=daily, intraday_return=intraday))
    return sorted(events, key=lambda e: e.daily_return if basis == "daily" else e.intraday_return)


def _day_key(x):
    if isinstance(x, dt.datetime):
        return x.date()
    if isinstance(x, dt.date):
        return x
    if isinstance(x, np.datetime64):
        return x.astype("datetime64[D]").item()
    if isinstance(x, str):
        return dt.date.fromisoformat(x[:10])
    return x


def align_events(indicator: IndicatorSeries, events, slope_window: int = 10) -> AlignmentReport:
    """Sign of the indicator's local trend just before each event.

    For each event the last ``slope_window`` valid indicator points dated
    strictly before the event day are regressed on their position; the
    event sits on an ascending slope when the least-squares slope is > 0.
    Events before the second valid point or after the last point are
    excluded with a warning.
    """
    keys = [_day_key(t) for t in indicator.window_end]
    valid_idx = np.nonzero(indicator.valid)[0]
    rows, excluded = [], []
    last = keys[-1]
    for ev in events:
        d = _day_key(ev.date if isinstance(ev, CrashEvent) else ev)
        before = [j for j in valid_idx if keys[j] < d][-slope_window:]
        if d > last or len(before) < 2:
            warnings.warn(f"event {d} outside the indicator span; excluded", RuntimeWarning,
                          stacklevel=2)
            excluded.append(d)
            continue
        y = indicator.var_omega[before]
        slope = float(np.polyfit(np.arange(len(y), dtype=float), y, 1)[0])
        rows.append(EventAlignment(date=d, slope=slope, ascending=slope > 0, n_points=len(before)))
    return AlignmentReport(events=rows, excluded=excluded, slope_window=slope_window)
