"""Multifractal random walk: exact simulation and estimation.

The discrete MRW at sampling step ``dt`` is

    dX[i] = eps[i] * exp(omega[i])

with ``eps`` i.i.d. N(0, sigma^2 dt) and ``omega`` a stationary Gaussian
process with mean ``-Var(omega)`` and covariance

    Cov(omega[i], omega[i+k]) = lambda2 * log(rho[k]),
    rho[k] = L / ((|k| + 1) dt)   if |k| <= L/dt - 1, else 1.

Everything below works in sample units: lags ``k`` are integers and the
decorrelation length is carried as ``L_over_dt``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

MIN_FIT_LAGS = 10


class MrwFitError(ValueError):
    """The log-absolute-return covariance cannot be fitted by an MRW."""


@dataclass(frozen=True)
class MrwParams:
    """MRW parameterization; ``L`` and ``delta_t`` share one time unit (minutes)."""

    sigma: float
    lambda2: float
    L: float
    delta_t: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not self.lambda2 >= 0:
            raise ValueError(f"lambda2 must be >= 0, got {self.lambda2}")
        if not self.delta_t > 0:
            raise ValueError(f"delta_t must be > 0, got {self.delta_t}")
        if not self.L >= self.delta_t:
            raise ValueError(f"L must be >= delta_t, got L={self.L}, delta_t={self.delta_t}")

    @classmethod
    def from_ratio(cls, lambda2: float, L_over_dt: float, sigma: float = 1.0,
                   delta_t: float = 1.0) -> "MrwParams":
        return cls(sigma=sigma, lambda2=lambda2, L=L_over_dt * delta_t, delta_t=delta_t)

    @property
    def L_over_dt(self) -> float:
        return self.L / self.delta_t

    @property
    def var_omega(self) -> float:
        return volatility_log_variance(self)


@dataclass
class MrwPath:
    values: np.ndarray
    params: MrwParams
    omega: np.ndarray | None = None
    seed: object = None

    def __len__(self):
        return len(self.values)


@dataclass
class MomentScaling:
    """Absolute moments ``M(q, dt)`` and their log-log slopes ``zeta``."""

    q: np.ndarray
    dt: np.ndarray
    moments: np.ndarray  # shape (len(q), len(dt))
    zeta: np.ndarray
    zeta_stderr: np.ndarray
    intercept: np.ndarray
    n_blocks: np.ndarray | None = None  # aggregated samples behind each dt


@dataclass
class LogAbsCovariance:
    lags: np.ndarray
    cov: np.ndarray
    zero_exclusions: int
    n: int
    warnings: list[str] = field(default_factory=list)


class ZetaFit(NamedTuple):
    lambda2: float
    residual: float
    at_boundary: bool


class MrwFit(NamedTuple):
    lambda2: float
    L_over_dt: float
    diagnostics: dict

    @property
    def var_omega(self) -> float:
        return self.lambda2 * self.diagnostics["log_L_over_dt"]


# ---------------------------------------------------------------------------
# model functions


def rho(k, L: float, delta_t: float = 1.0):
    """Correlation kernel of the MRW log-volatility, elementwise in ``k``."""
    ratio = L / delta_t
    if ratio < 1:
        raise ValueError(f"L/delta_t must be >= 1, got {ratio}")
    k = np.abs(np.asarray(k, dtype=float))
    out = np.where(k <= ratio - 1, ratio / (k + 1.0), 1.0)
    return out if out.ndim else float(out)


def omega_covariance(k, params: MrwParams):
    """``lambda2 * log(rho(k))``: the autocovariance of omega at lag ``k``."""
    out = params.lambda2 * np.log(rho(k, params.L, params.delta_t))
    return out if np.ndim(out) else float(out)


def volatility_log_variance(params: MrwParams) -> float:
    """Var(omega) = lambda2 * log(L/dt), the precursor scalar."""
    return params.lambda2 * math.log(params.L / params.delta_t)


def zeta_model(q, lambda2: float):
    """Multifractal spectrum ``(q - q(q-2) lambda2) / 2``."""
    q = np.asarray(q, dtype=float)
    out = (q - q * (q - 2.0) * lambda2) / 2.0
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# simulation


def _circulant_eigenvalues(cov_fn, m: int) -> np.ndarray:
    half = np.arange(m // 2 + 1)
    c = cov_fn(half)
    row = np.concatenate([c, c[-2:0:-1]])
    return np.fft.fft(row).real


def simulate(params: MrwParams, K: int, seed=None, *, rtol: float = 1e-10,
             max_doublings: int = 6) -> MrwPath:
    """Draw an exact MRW path of ``K`` increments.

    ``omega`` is sampled by circulant embedding of its Toeplitz covariance
    (FFT, O(m log m)); the embedding size starts at the next power of two
    covering ``2 (K - 1)`` and ``2 L/dt`` and is doubled while the
    embedding has negative eigenvalues beyond ``rtol`` of the largest one.

    Parameters
    ----------
    params : MrwParams
    K : int
        Number of increments, ``K >= 2``.
    seed : int, SeedSequence or Generator, optional
        Anything accepted by ``np.random.default_rng``.

    Returns
    -------
    MrwPath
        ``values`` holds the increments, ``omega`` the latent log-volatility.
    """
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    rng = np.random.default_rng(seed)
    var_omega = volatility_log_variance(params)

    m = 1 << max(1, math.ceil(math.log2(max(2 * (K - 1), 2 * params.L_over_dt, 2))))
    cov_fn = lambda k: omega_covariance(k, params)  # noqa: E731
    for _ in range(max_doublings + 1):
        eig = _circulant_eigenvalues(cov_fn, m)
        scale = max(float(eig.max()), 0.0)
        worst = float(eig.min())
        if worst >= -rtol * max(scale, 1e-300):
            break
        m *= 2
    else:
        raise ValueError(
            f"circulant embedding is not non-negative definite after padding to {m // 2}; "
            f"worst eigenvalue {worst:.3e}"
        )
    eig = np.clip(eig, 0.0, None)

    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    omega = np.fft.fft(np.sqrt(eig / m) * z).real[:K] - var_omega
    eps = rng.standard_normal(K) * (params.sigma * math.sqrt(params.delta_t))
    return MrwPath(values=eps * np.exp(omega), params=params, omega=omega, seed=seed)


# ---------------------------------------------------------------------------
# multifractal scaling


def _ols(x: np.ndarray, y: np.ndarray):
    """Slope, intercept, slope standard error and R^2 of y on x."""
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = np.sum((x - xm) * (y - ym)) / sxx
    intercept = ym - slope * xm
    resid = y - intercept - slope * x
    dof = len(x) - 2
    stderr = math.sqrt(np.sum(resid ** 2) / dof / sxx) if dof > 0 else float("nan")
    sst = np.sum((y - ym) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / sst if sst > 0 else float("nan")
    return float(slope), float(intercept), stderr, float(r2)


def default_scales(delta_t: float = 1.0, lo: float = 10.0, hi: float = 700.0,
                   num: int = 12) -> np.ndarray:
    """Log-spaced aggregation scales in time units, multiples of ``delta_t``."""
    steps = np.unique(np.round(np.geomspace(lo / delta_t, hi / delta_t, num)).astype(int))
    return steps[steps >= 1] * delta_t


def moment_scaling(series, q_list=(1, 2, 3, 4, 5), dt_list=None, delta_t: float = 1.0,
                   overlapping: bool = False) -> MomentScaling:
    """Absolute moments of aggregated increments versus time scale.

    The series is summed over blocks of ``dt / delta_t`` samples (disjoint
    unless ``overlapping``), ``M(q, dt) = mean |block sum|^q`` is computed and
    ``log M`` is regressed on ``log dt`` by OLS for each ``q``.

    A 2-D ``series`` is read as independent realizations (one per row);
    their blocks are pooled into a single ensemble average.
    """
    x = np.atleast_2d(np.asarray(series, dtype=float))
    q = np.asarray(q_list, dtype=float)
    dt = default_scales(delta_t) if dt_list is None else np.asarray(dt_list, dtype=float)
    if len(dt) < 3:
        raise ValueError(f"need at least 3 time scales, got {len(dt)}")
    if np.any(np.diff(dt) <= 0):
        raise ValueError("dt_list must be strictly increasing")
    if np.any(q <= 0) or np.any(q > 6):
        raise ValueError("q values must lie in (0, 6]")
    steps = np.round(dt / delta_t).astype(int)
    if np.any(steps < 1) or not np.allclose(steps * delta_t, dt):
        raise ValueError("every dt must be a positive multiple of delta_t")
    n = x.shape[1]
    if n < 20 * steps.max():
        raise ValueError(f"series of length {n} too short for scale {dt.max()}")

    csum = np.concatenate([np.zeros((len(x), 1)), np.cumsum(x, axis=1)], axis=1)
    moments = np.empty((len(q), len(dt)))
    counts = np.empty(len(dt), dtype=np.int64)
    for j, s in enumerate(steps):
        if overlapping:
            agg = csum[:, s:] - csum[:, :-s]
        else:
            nb = n // s
            agg = csum[:, s:nb * s + 1:s] - csum[:, 0:nb * s:s]
        a = np.abs(agg)
        counts[j] = a.size
        for i, qq in enumerate(q):
            moments[i, j] = np.mean(a ** qq)

    return _fit_moments(q, dt, moments, counts)


def _fit_moments(q, dt, moments, counts) -> MomentScaling:
    logdt = np.log(dt)
    zeta, err, icpt = (np.empty(len(q)) for _ in range(3))
    for i in range(len(q)):
        zeta[i], icpt[i], err[i], _ = _ols(logdt, np.log(moments[i]))
    return MomentScaling(q=q, dt=dt, moments=moments, zeta=zeta, zeta_stderr=err,
                         intercept=icpt, n_blocks=counts)


def pool_scaling(parts) -> MomentScaling:
    """Merge :func:`moment_scaling` results from batches of independent paths.

    Moments are averaged with weights equal to each batch's block counts,
    which reproduces a single call on all paths at once without holding
    them in memory together.
    """
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to pool")
    q, dt = parts[0].q, parts[0].dt
    for p in parts[1:]:
        if not (np.array_equal(p.q, q) and np.array_equal(p.dt, dt)):
            raise ValueError("scalings use different q or dt grids")
    w = np.array([p.n_blocks for p in parts], dtype=float)
    total = w.sum(axis=0)
    moments = sum(p.moments * wi for p, wi in zip(parts, w)) / total
    return _fit_moments(q, dt, moments, total.astype(np.int64))


def fit_zeta(scaling: MomentScaling | tuple) -> ZetaFit:
    """Least-squares ``lambda2 >= 0`` for the parabolic spectrum.

    Accepts a :class:`MomentScaling` or a ``(q, zeta)`` pair. The model is
    linear in ``lambda2``: ``zeta - q/2 = -lambda2 * q(q-2)/2``.
    """
    if isinstance(scaling, MomentScaling):
        q, zeta = scaling.q, scaling.zeta
    else:
        q, zeta = (np.asarray(a, dtype=float) for a in scaling)
    if len(q) < 3:
        raise ValueError(f"need at least 3 q points, got {len(q)}")
    # q = 2 carries no information on lambda2
    assert zeta_model(2.0, 0.123) == 1.0

    a = -q * (q - 2.0) / 2.0
    y = zeta - q / 2.0
    denom = float(np.sum(a * a))
    lam2 = float(np.sum(a * y) / denom) if denom > 0 else 0.0
    at_boundary = lam2 <= 0.0
    if at_boundary:
        lam2 = 0.0
    residual = float(np.sqrt(np.mean((zeta - zeta_model(q, lam2)) ** 2)))
    return ZetaFit(lambda2=lam2, residual=residual, at_boundary=at_boundary)


# ---------------------------------------------------------------------------
# log-volatility covariance


def _xcorr(a: np.ndarray, b: np.ndarray, nfft: int, max_lag: int) -> np.ndarray:
    """sum_i a[i] b[i+k] for k = 0..max_lag."""
    fa = np.fft.rfft(a, nfft)
    fb = np.fft.rfft(b, nfft)
    return np.fft.irfft(np.conj(fa) * fb, nfft)[: max_lag + 1]


def log_abs_cov(series, max_lag: int) -> LogAbsCovariance:
    """Sample covariance of ``log|x[i]|`` and ``log|x[i+k]|`` for ``k = 1..max_lag``.

    Pairs where either value is exactly zero are excluded; each lag uses the
    pairwise means of its surviving pairs and an ``n_pairs - 1`` denominator.
    """
    x = np.asarray(series, dtype=float)
    n = len(x)
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    if n <= 4 * max_lag:
        raise ValueError(f"series length {n} must exceed 4 * max_lag = {4 * max_lag}")

    valid = x != 0
    zeros = int(n - valid.sum())
    notes = []
    if zeros > 0.1 * n:
        msg = f"{zeros} of {n} samples ({zeros / n:.1%}) are zero and were excluded"
        notes.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)

    logs = np.zeros(n)
    logs[valid] = np.log(np.abs(x[valid]))
    logs[valid] -= logs[valid].mean()
    mask = valid.astype(float)

    nfft = 1 << math.ceil(math.log2(2 * n))
    pairs = np.rint(_xcorr(mask, mask, nfft, max_lag))
    sxy = _xcorr(logs, logs, nfft, max_lag)
    sx = _xcorr(logs, mask, nfft, max_lag)
    sy = _xcorr(mask, logs, nfft, max_lag)

    k = np.arange(1, max_lag + 1)
    npairs = pairs[k]
    with np.errstate(invalid="ignore", divide="ignore"):
        cov = (sxy[k] - sx[k] * sy[k] / npairs) / (npairs - 1)
    cov[npairs < 2] = np.nan
    return LogAbsCovariance(lags=k, cov=cov, zero_exclusions=zeros, n=n, warnings=notes)


def first_zero_crossing(cov: LogAbsCovariance, start: int = 1) -> int | None:
    """Smallest lag ``>= start`` at which the covariance is ``<= 0``."""
    idx = np.nonzero((cov.lags >= start) & ~(cov.cov > 0))[0]
    return int(cov.lags[idx[0]]) if len(idx) else None


def estimate_params(cov: LogAbsCovariance, fit_range: tuple[int, int | None] = (10, None)) -> MrwFit:
    """Fit ``Cov(k) = lambda2 * (log(L/dt) - log k)`` by OLS in semi-log coordinates.

    ``fit_range`` is an inclusive lag interval; an upper bound of ``None``
    stops one lag before the first zero crossing of the covariance at or
    after the lower bound (or at the largest available lag).

    Returns
    -------
    MrwFit
        ``(lambda2, L_over_dt, diagnostics)`` with diagnostics ``r2``,
        ``log_L_over_dt``, ``fit_range``, ``n_lags``, ``zero_crossing``, ``zero_exclusions``,
        ``warnings``.

    Raises
    ------
    MrwFitError
        Fewer than 10 lags in range, or a non-negative slope.
    """
    lo, hi = fit_range
    if hi is None:
        crossing = first_zero_crossing(cov, start=lo)
        hi = int(cov.lags[-1]) if crossing is None else crossing - 1
    if lo < 1 or lo > cov.lags[-1]:
        raise MrwFitError(f"fit range {fit_range} outside the available lags 1..{cov.lags[-1]}")
    sel = (cov.lags >= lo) & (cov.lags <= hi) & np.isfinite(cov.cov)
    if sel.sum() < MIN_FIT_LAGS:
        raise MrwFitError(f"MRW fit invalid: only {int(sel.sum())} lags in fit range [{lo}, {hi}]")

    slope, intercept, _, r2 = _ols(np.log(cov.lags[sel].astype(float)), cov.cov[sel])
    if not slope < 0:
        raise MrwFitError(f"MRW fit invalid: non-negative slope {slope:.3g} (no volatility clustering)")
    lam2 = -slope
    log_L = intercept / lam2
    L_over_dt = math.exp(log_L) if log_L < 700 else math.inf

    notes = list(cov.warnings)
    if L_over_dt > cov.n:
        notes.append(f"L/dt estimate {L_over_dt:.4g} exceeds series length {cov.n}")
        warnings.warn(notes[-1], RuntimeWarning, stacklevel=2)
    diagnostics = {
        "r2": r2,
        "log_L_over_dt": log_L,
        "fit_range": (int(lo), int(hi)),
        "n_lags": int(sel.sum()),
        "zero_crossing": first_zero_crossing(cov),
        "zero_exclusions": cov.zero_exclusions,
        "warnings": notes,
    }
    return MrwFit(lambda2=lam2, L_over_dt=L_over_dt, diagnostics=diagnostics)


def estimate_sigma(series, params: MrwParams) -> float:
    """Diagnostic noise scale: sample Var(dX) / dt under the E(omega) = -Var(omega) convention."""
    x = np.asarray(series, dtype=float)
    return math.sqrt(np.var(x, ddof=1) / params.delta_t)
