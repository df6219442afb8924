"""Minute-bar ingestion, intraday log-returns and de-seasonalization."""

from __future__ import annotations

import csv
import datetime as dt
import re
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

BAR_HEADER = ["date", "time", "symbol", "price"]
_TIME_RE = re.compile(r"^([01]\d|2[0-3]):([0-5]\d)$")


class PanelError(ValueError):
    """Malformed input or a panel that cannot be assembled."""


class PanelWarning(UserWarning):
    """Gap filling, day exclusions and degenerate seasonal slots."""


def _minute(hhmm: str) -> int:
    m = _TIME_RE.match(hhmm)
    if not m:
        raise ValueError(f"bad time {hhmm!r}, expected HH:MM")
    return int(m.group(1)) * 60 + int(m.group(2))


def _label(minute: int) -> str:
    return f"{minute // 60:02d}:{minute % 60:02d}"


@dataclass(frozen=True)
class GridSpec:
    """Intraday session definition.

    Sessions are inclusive ``(open, close)`` wall-clock intervals; the grid is
    their minutes in order, with a lunch break collapsed, after dropping the
    first ``skip_open_minutes`` of the day. The default is the Tokyo session
    of 2007-2009, which leaves 242 grid minutes per day.
    """

    sessions: tuple[tuple[str, str], ...] = (("09:00", "11:00"), ("12:30", "15:00"))
    skip_open_minutes: int = 30

    def minutes(self) -> list[int]:
        out: list[int] = []
        for start, end in self.sessions:
            a, b = _minute(start), _minute(end)
            if b < a:
                raise ValueError(f"session {start}-{end} closes before it opens")
            out.extend(range(a, b + 1))
        if self.skip_open_minutes < 0 or self.skip_open_minutes >= len(out):
            raise ValueError(f"skip_open_minutes={self.skip_open_minutes} leaves an empty grid")
        return out[self.skip_open_minutes:]

    def labels(self) -> list[str]:
        return [_label(m) for m in self.minutes()]

    @property
    def first_open(self) -> int:
        return _minute(self.sessions[0][0])

    @property
    def last_close(self) -> int:
        return _minute(self.sessions[-1][1])


@dataclass
class PricePanel:
    """Prices on a common intraday grid; ``grid`` is ``N x T`` with
    ``T = sum(minutes_per_day)``. A row is NaN over a day on which that symbol
    never traded."""

    symbols: list[str]
    trading_days: list[dt.date]
    slots: list[str]
    grid: np.ndarray
    minutes_per_day: list[int]
    warnings: list[str] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape

    def day_columns(self, d: int) -> slice:
        start = sum(self.minutes_per_day[:d])
        return slice(start, start + self.minutes_per_day[d])


@dataclass
class ReturnPanel:
    """Log-returns sampled every ``delta_t`` grid minutes within each day.

    Column ``j`` is the return ending at slot ``slot_index[j]`` of day
    ``day_index[j]``; ``slot_index`` counts returns within the day, so it is
    also the time-of-day key used by the seasonal profile.
    """

    symbols: list[str]
    days: list[dt.date]
    values: np.ndarray
    day_index: np.ndarray
    slot_index: np.ndarray
    slot_labels: list[str]
    delta_t: int
    deseasonalized: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def timestamps(self) -> list[str]:
        return [self.timestamp(j) for j in range(self.values.shape[1])]

    def timestamp(self, j: int) -> str:
        return f"{self.days[self.day_index[j]].isoformat()} {self.slot_labels[self.slot_index[j]]}"

    def columns_for_days(self, first: int, stop: int) -> np.ndarray:
        return np.nonzero((self.day_index >= first) & (self.day_index < stop))[0]


@dataclass
class SeasonalProfile:
    symbols: list[str]
    values: np.ndarray  # N x slots
    slot_labels: list[str]
    delta_t: int


# ---------------------------------------------------------------------------


def read_bars(path) -> list[tuple[dt.date, int, str, float, int]]:
    """Parse one bar file into ``(date, minute, symbol, price, line)`` rows."""
    path = Path(path)
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != BAR_HEADER:
            raise PanelError(f"{path}:1: expected header {','.join(BAR_HEADER)}, got {header}")
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            try:
                if len(rec) != 4:
                    raise ValueError(f"expected 4 fields, got {len(rec)}")
                day = dt.date.fromisoformat(rec[0].strip())
                minute = _minute(rec[1].strip())
                symbol = rec[2].strip()
                price = float(rec[3])
                if not symbol:
                    raise ValueError("empty symbol")
                if not price > 0 or not np.isfinite(price):
                    raise ValueError(f"price must be positive, got {rec[3]!r}")
            except ValueError as exc:
                raise PanelError(f"{path}:{lineno}: {exc}") from None
            rows.append((day, minute, symbol, price, lineno))
    return rows


def _warn(msg: str, sink: list[str]):
    sink.append(msg)
    warnings.warn(msg, PanelWarning, stacklevel=3)


def load_panel(files, symbol_list, grid_spec: GridSpec | None = None) -> PricePanel:
    """Align minute bars of the requested symbols on the intraday grid.

    Each grid cell takes the last price observed at or before that minute on
    the same day (bars inside the trimmed opening seed the fill); minutes
    before a symbol's first bar of the day take that first price. A symbol
    with no bar at all on a day is NaN for the whole day.

    Raises
    ------
    PanelError
        Malformed rows (with file and line), non-increasing timestamps within
        a (symbol, date), empty symbol list, or no usable trading day.
    """
    grid_spec = grid_spec or GridSpec()
    symbols = list(dict.fromkeys(symbol_list))
    if not symbols:
        raise PanelError("symbol list is empty")
    wanted = set(symbols)
    grid_minutes = np.array(grid_spec.minutes())
    lo, hi = grid_spec.first_open, grid_spec.last_close

    bars: dict[tuple[str, dt.date], list[tuple[int, float]]] = {}
    for path in files:
        for day, minute, sym, price, lineno in read_bars(path):
            if sym not in wanted or not lo <= minute <= hi:
                continue
            series = bars.setdefault((sym, day), [])
            if series and minute <= series[-1][0]:
                raise PanelError(f"{path}:{lineno}: time {_label(minute)} for {sym} on {day} "
                                 "is not after the previous bar")
            series.append((minute, price))

    days = sorted({day for _, day in bars})
    if not days:
        raise PanelError("no trading day has data for the requested symbols")

    M = len(grid_minutes)
    grid = np.full((len(symbols), M * len(days)), np.nan)
    notes: list[str] = []
    for d, day in enumerate(days):
        for i, sym in enumerate(symbols):
            series = bars.get((sym, day))
            if not series:
                _warn(f"{sym} has no prices on {day}; excluded from that day", notes)
                continue
            times = np.array([t for t, _ in series])
            prices = np.array([p for _, p in series])
            pos = np.searchsorted(times, grid_minutes, side="right") - 1
            filled = prices[np.maximum(pos, 0)]
            n_gaps = int(np.sum(~np.isin(grid_minutes, times)))
            if n_gaps:
                _warn(f"{sym} on {day}: filled {n_gaps} missing grid minute(s)", notes)
            grid[i, d * M:(d + 1) * M] = filled

    return PricePanel(symbols=symbols, trading_days=days, slots=grid_spec.labels(),
                      grid=grid, minutes_per_day=[M] * len(days), warnings=notes)


def log_returns(panel: PricePanel, delta_t: int = 1) -> ReturnPanel:
    """``log P(t) - log P(t - delta_t)`` within each day, sampled every ``delta_t``.

    Day ``d`` contributes ``(minutes_per_day[d] - 1) // delta_t`` returns
    built from grid minutes ``0, delta_t, 2 delta_t, ...``; no return
    spans the overnight gap.
    """
    delta_t = int(delta_t)
    if delta_t < 1:
        raise PanelError(f"delta_t must be a positive number of grid minutes, got {delta_t}")
    if delta_t >= min(panel.minutes_per_day):
        raise PanelError(f"delta_t={delta_t} is not shorter than a session "
                         f"({min(panel.minutes_per_day)} minutes)")
    logp = np.log(panel.grid)
    blocks, day_idx, slot_idx = [], [], []
    for d in range(len(panel.trading_days)):
        sampled = logp[:, panel.day_columns(d)][:, ::delta_t]
        r = np.diff(sampled, axis=1)
        blocks.append(r)
        day_idx.append(np.full(r.shape[1], d))
        slot_idx.append(np.arange(r.shape[1]))
    n_slots = max(len(s) for s in slot_idx)
    labels = [panel.slots[(s + 1) * delta_t] for s in range(n_slots)]
    return ReturnPanel(symbols=list(panel.symbols), days=list(panel.trading_days),
                       values=np.concatenate(blocks, axis=1),
                       day_index=np.concatenate(day_idx), slot_index=np.concatenate(slot_idx),
                       slot_labels=labels, delta_t=delta_t)


def build_seasonal_profile(returns: ReturnPanel) -> SeasonalProfile:
    """Per-symbol sample std (ddof=1) of returns at each time-of-day slot over all days.

    Zero-variance slots fall back to the symbol's overall return std, with a
    :class:`PanelWarning`; a symbol that never moves falls back to 1.
    """
    x = returns.values
    n_slots = int(returns.slot_index.max()) + 1
    prof = np.empty((x.shape[0], n_slots))
    for s in range(n_slots):
        cols = x[:, returns.slot_index == s]
        counts = np.sum(np.isfinite(cols), axis=1)
        if np.any(counts < 2):
            bad = returns.symbols[int(np.argmin(counts))]
            raise PanelError(f"slot {returns.slot_labels[s]} has fewer than 2 observations for {bad}")
        prof[:, s] = np.nanstd(cols, axis=1, ddof=1)

    notes: list[str] = []
    for i in np.nonzero(np.any(prof <= 0, axis=1))[0]:
        overall = float(np.nanstd(x[i], ddof=1))
        fill = overall if overall > 0 else 1.0
        nbad = int(np.sum(prof[i] <= 0))
        _warn(f"{returns.symbols[i]}: {nbad} zero-variance seasonal slot(s) replaced by {fill:.6g}",
              notes)
        prof[i, prof[i] <= 0] = fill
    return SeasonalProfile(symbols=list(returns.symbols), values=prof,
                           slot_labels=list(returns.slot_labels), delta_t=returns.delta_t)


def deseasonalize(returns: ReturnPanel, profile: SeasonalProfile) -> ReturnPanel:
    """Divide every return by its symbol's time-of-day std."""
    if profile.values.shape[0] != returns.values.shape[0] or \
            profile.values.shape[1] <= int(returns.slot_index.max()):
        raise PanelError("profile shape does not match the return panel")
    return replace(returns, values=returns.values / profile.values[:, returns.slot_index],
                   deseasonalized=True)
