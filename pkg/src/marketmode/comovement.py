"""Windowed correlation matrices, the market mode and correlation diagnostics."""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from marketmode.panel import ReturnPanel

DENSE_MAX_N = 512


class EigenSolverError(ArithmeticError):
    def __init__(self, msg: str, residual: float):
        super().__init__(msg)
        self.residual = residual


@dataclass
class NormalizedWindow:
    """Rows standardized within the window (mean 0, sample std 1)."""

    G: np.ndarray
    symbols: list[str]
    columns: np.ndarray
    timestamps: list[str]
    mu: np.ndarray
    sigma: np.ndarray
    dropped: list[str] = field(default_factory=list)

    @property
    def start(self) -> str:
        return self.timestamps[0]

    @property
    def end(self) -> str:
        return self.timestamps[-1]


@dataclass
class CorrelationSnapshot:
    window_start: str
    window_end: str
    symbols: list[str]
    max_eigenvalue: float
    market_mode_weights: np.ndarray
    eigenvalues: np.ndarray | None = None
    residual: float = 0.0
    dropped: list[str] = field(default_factory=list)

    @property
    def n_symbols(self) -> int:
        return len(self.symbols)


@dataclass
class MarketModeSeries:
    timestamps: list
    values: np.ndarray
    delta_t: float

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class WindowScheme:
    """Windows made of whole trading days.

    ``width_days=1, step_days=1`` is the day-to-day scheme; the sliding
    scheme is five days wide (5 x 242 minutes) and advances one day at a
    time.
    """

    width_days: int = 1
    step_days: int = 1

    def __post_init__(self):
        if self.width_days < 1 or self.step_days < 1:
            raise ValueError("window width and step must be at least one day")

    def starts(self, n_days: int) -> range:
        if n_days < self.width_days:
            raise ValueError(f"panel has {n_days} days, fewer than the window width {self.width_days}")
        return range(0, n_days - self.width_days + 1, self.step_days)


PER_DAY = WindowScheme(1, 1)
SLIDING = WindowScheme(5, 1)


class Correlogram(NamedTuple):
    lags: np.ndarray
    values: np.ndarray
    band: float


# ---------------------------------------------------------------------------


def normalize_window(panel: ReturnPanel, window) -> NormalizedWindow:
    """Standardize each symbol's returns over the window's columns.

    ``window`` is a slice or an array of column indices. Symbols with a
    missing value or zero variance in the window are dropped with a warning.
    """
    cols = np.arange(panel.values.shape[1])[window]
    if len(cols) < 2:
        raise ValueError(f"window needs at least 2 columns, got {len(cols)}")
    x = panel.values[:, cols]
    mu = x.mean(axis=1)
    sigma = x.std(axis=1, ddof=1)
    keep = np.isfinite(sigma) & (sigma > 0)
    stamps = [panel.timestamp(c) for c in cols]
    dropped = [s for s, k in zip(panel.symbols, keep) if not k]
    if dropped:
        warnings.warn(f"window {stamps[0]}..{stamps[-1]}: dropped {len(dropped)} symbol(s) "
                      f"with missing or constant returns: {', '.join(dropped)}", RuntimeWarning,
                      stacklevel=2)
    if not keep.any():
        raise ValueError(f"window {stamps[0]}..{stamps[-1]} has no usable symbol")
    G = (x[keep] - mu[keep, None]) / sigma[keep, None]
    return NormalizedWindow(G=G, symbols=[s for s, k in zip(panel.symbols, keep) if k],
                            columns=cols, timestamps=stamps, mu=mu[keep], sigma=sigma[keep],
                            dropped=dropped)


def correlation_matrix(win: NormalizedWindow | np.ndarray) -> np.ndarray:
    """``C = G G^T / (T' - 1)``, symmetrized."""
    G = win.G if isinstance(win, NormalizedWindow) else np.asarray(win, dtype=float)
    T = G.shape[1]
    if T < 2:
        raise ValueError("need at least 2 columns")
    C = G @ G.T / (T - 1)
    return (C + C.T) / 2


def _fix_sign(v: np.ndarray) -> np.ndarray:
    m = v.mean()
    if m < 0 or (m == 0 and v[np.argmax(np.abs(v))] < 0):
        return -v
    return v


def power_iteration(C: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000):
    """Dominant eigenpair of a symmetric PSD matrix.

    Stops when ``||Cv - lam v|| <= tol * ||C||_F``.
    """
    n = C.shape[0]
    norm = np.linalg.norm(C)
    if norm == 0:
        return 0.0, np.full(n, 1 / np.sqrt(n)), 0.0
    # uniform start suits the market mode; the ramp breaks exact orthogonality
    v = np.ones(n) + 1e-3 * np.linspace(-1.0, 1.0, n)
    v /= np.linalg.norm(v)
    resid = np.inf
    for _ in range(max_iter):
        w = C @ v
        lam = float(v @ w)
        resid = float(np.linalg.norm(w - lam * v))
        if resid <= tol * norm:
            return lam, v, resid
        v = w / np.linalg.norm(w)
    raise EigenSolverError(f"power iteration did not converge in {max_iter} iterations "
                           f"(residual {resid:.3e})", resid)


def _eigen(C: np.ndarray, method: str, tol: float, max_iter: int):
    if method == "auto":
        method = "dense" if C.shape[0] <= DENSE_MAX_N else "power"
    if method == "dense":
        vals, vecs = np.linalg.eigh(C)
        lam, v = float(vals[-1]), vecs[:, -1]
        return lam, _fix_sign(v), vals[::-1].copy()
    if method == "power":
        lam, v, _ = power_iteration(C, tol=tol, max_iter=max_iter)
        return lam, _fix_sign(v), None
    raise ValueError(f"unknown eigensolver {method!r}")


def max_eigenpair(C: np.ndarray, method: str = "auto", tol: float = 1e-10,
                  max_iter: int = 10_000) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and its unit eigenvector, with non-negative mean weight.

    ``method`` is ``"dense"`` (full symmetric decomposition), ``"power"``
    or ``"auto"`` (dense up to 512 symbols).
    """
    lam, v, _ = _eigen(np.asarray(C, dtype=float), method, tol, max_iter)
    return lam, v


def snapshot(win: NormalizedWindow, method: str = "auto") -> CorrelationSnapshot:
    C = correlation_matrix(win)
    lam, v, vals = _eigen(C, method, 1e-10, 10_000)
    resid = float(np.linalg.norm(C @ v - lam * v))
    n = C.shape[0]
    tol = 1e-8 * n
    if not 1 - tol <= lam <= n + tol:
        raise ArithmeticError(f"max eigenvalue {lam} outside [1, {n}] for window {win.start}")
    if vals is not None and abs(vals.sum() - n) > 1e-6 * n:
        raise ArithmeticError(f"eigenvalue sum {vals.sum()} != {n} for window {win.start}")
    return CorrelationSnapshot(window_start=win.start, window_end=win.end, symbols=win.symbols,
                               max_eigenvalue=lam, market_mode_weights=v, eigenvalues=vals,
                               residual=resid, dropped=win.dropped)


def parallel_map(fn, items, threads: int):
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def rolling_eigenvalues(panel: ReturnPanel, scheme: WindowScheme = PER_DAY,
                        method: str = "auto", threads: int = 1) -> list[CorrelationSnapshot]:
    """One correlation snapshot per window of whole days, in window order."""
    starts = scheme.starts(len(panel.days))

    def one(first: int) -> CorrelationSnapshot:
        cols = panel.columns_for_days(first, first + scheme.width_days)
        return snapshot(normalize_window(panel, cols), method)

    return parallel_map(one, starts, threads)


def market_mode_series(win: NormalizedWindow, weights) -> MarketModeSeries:
    """Projection ``sum_i w_i g_ij`` of the window onto the market-mode weights."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (win.G.shape[0],):
        raise ValueError(f"weights have length {w.size}, window has {win.G.shape[0]} symbols")
    return MarketModeSeries(timestamps=list(win.timestamps), values=w @ win.G, delta_t=np.nan)


def market_mode(panel: ReturnPanel, block_days: int = 5, global_weights: bool = False,
                method: str = "auto", threads: int = 1) -> MarketModeSeries:
    """Market-mode return series over the whole panel.

    The panel is tiled into consecutive non-overlapping blocks of
    ``block_days`` days (the last block may be shorter); each block is
    normalized and projected on its own first principal component. With
    ``global_weights`` a single weight vector from the full-sample
    correlation matrix is used for every block instead.
    """
    n_days = len(panel.days)
    starts = range(0, n_days, block_days)
    gw = None
    if global_weights:
        full = normalize_window(panel, slice(None))
        _, gw = max_eigenpair(correlation_matrix(full), method)
        gw = dict(zip(full.symbols, gw))

    def one(first: int) -> MarketModeSeries:
        cols = panel.columns_for_days(first, min(first + block_days, n_days))
        win = normalize_window(panel, cols)
        if gw is None:
            _, w = max_eigenpair(correlation_matrix(win), method)
        else:
            w = np.array([gw.get(s, 0.0) for s in win.symbols])
        return market_mode_series(win, w)

    parts = parallel_map(one, starts, threads)
    return MarketModeSeries(timestamps=[t for p in parts for t in p.timestamps],
                            values=np.concatenate([p.values for p in parts]),
                            delta_t=panel.delta_t)


# ---------------------------------------------------------------------------


def acf(series, max_lag: int) -> Correlogram:
    """Sample autocorrelation for lags ``0..max_lag`` with a +-1.96/sqrt(n) band."""
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n <= max_lag + 2:
        raise ValueError(f"series length {n} must exceed max_lag + 2 = {max_lag + 2}")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    d = x - x.mean()
    denom = d @ d
    vals = np.array([1.0] + [d[:n - k] @ d[k:] / denom for k in range(1, max_lag + 1)])
    return Correlogram(lags=np.arange(max_lag + 1), values=vals, band=1.96 / np.sqrt(n))


def ccf(series_a, series_b, max_lag: int) -> Correlogram:
    """Sample cross-correlation ``corr(a[t], b[t + k])`` for ``k = -max_lag..max_lag``.

    A positive peak at ``k > 0`` means ``b`` follows ``a`` by ``k`` steps.
    """
    a = np.asarray(series_a, dtype=float)
    b = np.asarray(series_b, dtype=float)
    n = len(a)
    if len(b) != n:
        raise ValueError("series must have equal length")
    if n <= 2 * max_lag:
        raise ValueError(f"series length {n} must exceed 2 * max_lag = {2 * max_lag}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("series contain non-finite values")
    da, db = a - a.mean(), b - b.mean()
    scale = n * a.std() * b.std()
    lags = np.arange(-max_lag, max_lag + 1)
    vals = np.array([(da[:n - k] @ db[k:] if k >= 0 else da[-k:] @ db[:n + k]) / scale
                     for k in lags])
    return Correlogram(lags=lags, values=vals, band=1.96 / np.sqrt(n))
