"""Command-line pipeline: ``marketmode <subcommand> [options]``.

Subcommands: ingest, eigen, simulate, mrw-fit, precursor, acf, ccf.
Exit codes: 0 ok, 1 analysis failure, 2 I/O or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from marketmode import __version__
from marketmode.comovement import (
    MarketModeSeries,
    WindowScheme,
    acf,
    ccf,
    market_mode,
    rolling_eigenvalues,
)
from marketmode.config import ConfigError, RunConfig
from marketmode.mrw import (
    MrwParams,
    estimate_params,
    fit_zeta,
    log_abs_cov,
    moment_scaling,
    simulate,
)
from marketmode.panel import (
    GridSpec,
    PanelError,
    build_seasonal_profile,
    deseasonalize,
    load_panel,
    log_returns,
)
from marketmode.precursor import (
    CrashEvent,
    SlidingConfig,
    align_events,
    label_crashes,
    sliding_indicator,
)

EXIT_OK, EXIT_ANALYSIS, EXIT_IO = 0, 1, 2


class InputError(Exception):
    """Missing or unreadable input; maps to exit code 2."""


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "nan" if np.isnan(v) else f"{float(v):.12g}"
    return str(v)


class Run:
    """Output directory, artifact writer and run log for one subcommand."""

    def __init__(self, command: str, cfg: RunConfig):
        self.command = command
        self.cfg = cfg
        self.out = Path(cfg.get("run", "out_dir"))
        self.artifacts: list[str] = []
        self.warnings: list[str] = []
        self.threads = max(1, cfg.get_int("run", "threads", 1))

    def path(self, name: str) -> Path:
        p = self.out / name
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def write_csv(self, name: str, header, rows):
        with self.path(name).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
        self.artifacts.append(name)

    def write_text(self, name: str, text: str):
        self.path(name).write_text(text, encoding="utf-8")
        self.artifacts.append(name)

    def write_log(self, status: str):
        lines = [
            f"marketmode {__version__} {self.command}",
            f"config_sha256 = {self.cfg.digest()}",
            f"status = {status}",
        ]
        lines += [f"artifact = {a}" for a in self.artifacts]
        lines.append(f"warnings = {len(self.warnings)}")
        lines += [f"warning: {w}" for w in self.warnings]
        self.path("run.log").write_text("\n".join(lines) + "\n", encoding="utf-8")
        self.path("config.ini").write_text(self.cfg.to_text(), encoding="utf-8")


# ---------------------------------------------------------------------------
# input helpers


def _require(path: str, what: str) -> Path:
    if not path:
        raise InputError(f"no {what} given")
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{what} not found: {p}")
    return p


def _grid_spec(cfg: RunConfig) -> GridSpec:
    sessions = []
    for part in cfg.get_list("data", "sessions"):
        try:
            a, b = (s.strip() for s in part.split("-"))
        except ValueError:
            raise ConfigError(f"data.sessions: bad interval {part!r}, expected HH:MM-HH:MM") from None
        sessions.append((a, b))
    try:
        spec = GridSpec(sessions=tuple(sessions), skip_open_minutes=cfg.get_int("data", "skip_open_minutes", 30))
        spec.minutes()
    except ValueError as exc:
        raise ConfigError(f"data.sessions: {exc}") from None
    return spec


def _symbols(cfg: RunConfig) -> list[str]:
    p = _require(cfg.get("data", "symbols"), "symbol list")
    return [ln.strip() for ln in p.read_text(encoding="utf-8").splitlines()
            if ln.strip() and not ln.startswith("#")]


def _panel(cfg: RunConfig):
    files = [_require(f, "bar file") for f in cfg.get_list("data", "bars")]
    if not files:
        raise InputError("no bar files given (data.bars / --bars)")
    return load_panel(files, _symbols(cfg), _grid_spec(cfg))


def _returns(panel, delta_t: int):
    raw = log_returns(panel, delta_t)
    return deseasonalize(raw, build_seasonal_profile(raw))


def read_series(path: str, column: str = ""):
    """Numeric column of a CSV (header optional) and its timestamps if present."""
    p = _require(path, "series file")
    with p.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise InputError(f"series file is empty: {p}")
    header = None
    try:
        float(rows[0][-1])
    except ValueError:
        header, rows = [h.strip() for h in rows[0]], rows[1:]
    if header is None:
        col = int(column) if column else len(rows[0]) - 1
        stamps = None
    else:
        if column:
            name = column
        else:
            name = next((c for c in ("value", "delta_x", "var_omega") if c in header), header[-1])
        if name not in header:
            raise InputError(f"{p}: no column {name!r} in header {header}")
        col = header.index(name)
        ts_col = next((header.index(c) for c in ("timestamp", "window_end", "index", "date")
                       if c in header), None)
        stamps = [r[ts_col] for r in rows] if ts_col is not None else None
    try:
        values = np.array([float(r[col]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise InputError(f"{p}: non-numeric series value ({exc})") from None
    return values, stamps


def _stamp_key(s):
    try:
        return int(s)
    except (TypeError, ValueError):
        return s


def read_index(path: str):
    """Daily index rows ``date,open,close,prev_close`` (prev_close may be blank)."""
    p = _require(path, "index file")
    out = []
    with p.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        need = {"date", "open", "close", "prev_close"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise InputError(f"{p}: header must contain {','.join(sorted(need))}")
        for n, r in enumerate(reader, start=2):
            try:
                prev = float(r["prev_close"]) if r["prev_close"].strip() else None
                out.append((dt.date.fromisoformat(r["date"].strip()), float(r["open"]),
                            float(r["close"]), prev))
            except ValueError as exc:
                raise InputError(f"{p}:{n}: {exc}") from None
    # chain previous close from the prior row where blank
    chained = []
    for i, (d, o, c, prev) in enumerate(out):
        if prev is None and i > 0:
            prev = out[i - 1][2]
        chained.append((d, o, c, prev))
    return chained


def read_events(path: str) -> list[CrashEvent]:
    p = _require(path, "events file")
    with p.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        try:
            return [CrashEvent(date=_stamp_key(r["date"].strip()), daily_return=float(r["daily_return"]),
                               intraday_return=float(r["intraday_return"]), source="provided")
                    for r in reader]
        except (KeyError, ValueError) as exc:
            raise InputError(f"{p}: bad events file ({exc})") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest(run: Run):
    cfg = run.cfg
    panel = _panel(cfg)
    delta_t = cfg.get_int("data", "delta_t", 1)
    ret = _returns(panel, delta_t)
    day_labels = [d.isoformat() for d in panel.trading_days]
    M = panel.minutes_per_day[0]
    stamps = [f"{day_labels[j // M]} {panel.slots[j % M]}" for j in range(panel.grid.shape[1])]
    run.write_csv("prices.csv", ["timestamp", *panel.symbols],
                  ([stamps[j], *panel.grid[:, j]] for j in range(panel.grid.shape[1])))
    run.write_csv(f"returns_dt{delta_t}.csv", ["timestamp", *ret.symbols],
                  ([ret.timestamp(j), *ret.values[:, j]] for j in range(ret.values.shape[1])))


def _snapshot_rows(snaps):
    return ([s.window_start, s.window_end, s.n_symbols, s.max_eigenvalue] for s in snaps)


def _write_weights(run: Run, folder: str, snaps):
    for k, s in enumerate(snaps):
        run.write_csv(f"{folder}/snapshot_{k:05d}.csv", ["symbol", "weight"],
                      zip(s.symbols, s.market_mode_weights))


def _abs_intraday(cfg: RunConfig, panel):
    """|open-to-close log-return| per day, from the index file or an equal-weight proxy."""
    if cfg.get("eigen", "index"):
        return {d: abs(math.log(c / o)) for d, o, c, _ in read_index(cfg.get("eigen", "index"))}
    out = {}
    for d, day in enumerate(panel.trading_days):
        block = panel.grid[:, panel.day_columns(d)]
        r = np.log(block[:, -1] / block[:, 0])
        r = r[np.isfinite(r)]
        if len(r):
            out[day] = abs(float(r.mean()))
    return out


def cmd_eigen(run: Run):
    cfg = run.cfg
    panel = _panel(cfg)
    dt_day = cfg.get_int("eigen", "daily_delta_t", 1)
    dt_slide = cfg.get_int("eigen", "sliding_delta_t", 5)
    daily_ret = _returns(panel, dt_day)
    slide_ret = _returns(panel, dt_slide)
    header = ["window_start", "window_end", "n_symbols", "max_eigenvalue"]

    daily = rolling_eigenvalues(daily_ret, WindowScheme(1, 1), threads=run.threads)
    run.write_csv(f"eigen_daily_dt{dt_day}.csv", header, _snapshot_rows(daily))
    scheme = WindowScheme(cfg.get_int("eigen", "width_days", 5), cfg.get_int("eigen", "step_days", 1))
    sliding = rolling_eigenvalues(slide_ret, scheme, threads=run.threads)
    run.write_csv(f"eigen_sliding_dt{dt_slide}.csv", header, _snapshot_rows(sliding))
    if cfg.get_bool("eigen", "weights"):
        _write_weights(run, f"weights_daily_dt{dt_day}", daily)
        _write_weights(run, f"weights_sliding_dt{dt_slide}", sliding)

    mm = market_mode(slide_ret, block_days=cfg.get_int("eigen", "block_days", 5),
                     global_weights=cfg.get_bool("eigen", "global_weights"), threads=run.threads)
    run.write_csv(f"market_mode_dt{dt_slide}.csv", ["timestamp", "value"], zip(mm.timestamps, mm.values))

    lam = np.array([s.max_eigenvalue for s in daily])
    max_lag = cfg.get_int("eigen", "max_lag", 20)
    lag_a = min(max_lag, len(lam) - 3)
    if lag_a >= 1:
        r = acf(lam, lag_a)
        run.write_csv(f"acf_eigen_dt{dt_day}.csv", ["lag", "value", "band"],
                      ((k, v, r.band) for k, v in zip(r.lags, r.values)))
    else:
        run.warnings.append("too few days for the eigenvalue autocorrelation")

    absret = _abs_intraday(cfg, panel)
    pairs = [(s.max_eigenvalue, absret[day]) for s, day in zip(daily, panel.trading_days) if day in absret]
    lag_c = min(max_lag, (len(pairs) - 1) // 2)
    if lag_c >= 1:
        a, b = map(np.array, zip(*pairs))
        r = ccf(a, b, lag_c)
        run.write_csv(f"ccf_eigen_absret_dt{dt_day}.csv", ["lag", "value", "band"],
                      ((k, v, r.band) for k, v in zip(r.lags, r.values)))
    else:
        run.warnings.append("too few days for the eigenvalue/return cross-correlation")


def cmd_simulate(run: Run):
    cfg = run.cfg
    try:
        params = MrwParams.from_ratio(cfg.get_float("mrw", "lambda2"), cfg.get_float("mrw", "L_over_dt"),
                                      sigma=cfg.get_float("mrw", "sigma"),
                                      delta_t=cfg.get_float("mrw", "delta_t"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    seed = np.random.SeedSequence(cfg.get_int("run", "seed", 0))
    path = simulate(params, cfg.get_int("mrw", "length"), seed=seed)
    run.write_csv("mrw_path.csv", ["index", "delta_x", "omega"],
                  zip(range(len(path)), path.values, path.omega))


def cmd_mrw_fit(run: Run):
    cfg = run.cfg
    x, _ = read_series(cfg.get("mrw", "series"), cfg.get("mrw", "column"))
    delta_t = cfg.get_float("mrw", "delta_t", 1.0)
    max_lag = min(cfg.get_int("mrw", "max_lag", 1024), (len(x) - 1) // 4)
    cov = log_abs_cov(x, max_lag)
    fit = estimate_params(cov, (cfg.get_int("mrw", "fit_lo", 10), cfg.get_int("mrw", "fit_hi")))
    run.write_csv("log_abs_cov.csv", ["lag", "cov"], zip(cov.lags, cov.cov))
    report = {
        "lambda2": fit.lambda2,
        "L_over_dt": fit.L_over_dt,
        "L": fit.L_over_dt * delta_t,
        "var_omega": fit.var_omega,
        "r2": fit.diagnostics["r2"],
        "fit_range": list(fit.diagnostics["fit_range"]),
        "zero_crossing": fit.diagnostics["zero_crossing"],
        "zero_exclusions": fit.diagnostics["zero_exclusions"],
        "n": len(x),
    }
    scales = np.array([s for s in (1, 2, 4, 8, 16, 32, 64, 128) if 20 * s <= len(x)], dtype=float)
    if len(scales) >= 3:
        ms = moment_scaling(x, (1, 2, 3, 4, 5), scales * delta_t, delta_t=delta_t)
        zf = fit_zeta(ms)
        report["zeta"] = {"q": ms.q.tolist(), "zeta": ms.zeta.tolist(), "lambda2": zf.lambda2,
                          "residual": zf.residual, "at_boundary": zf.at_boundary}
        run.write_csv("moments.csv", ["q", *[f"dt_{fmt(d)}" for d in ms.dt]],
                      ([q, *row] for q, row in zip(ms.q, ms.moments)))
    run.warnings.extend(fit.diagnostics["warnings"])
    run.write_text("mrw_fit.json", json.dumps(_round(report), indent=2, sort_keys=True) + "\n")


def _round(obj):
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round(v) for v in obj]
    return obj


def cmd_precursor(run: Run):
    cfg = run.cfg
    x, stamps = read_series(cfg.get("precursor", "series"), cfg.get("precursor", "column"))
    delta_t = cfg.get_float("precursor", "delta_t", 5.0)
    series = MarketModeSeries(timestamps=[_stamp_key(s) for s in stamps] if stamps else list(range(len(x))),
                              values=x, delta_t=delta_t)
    try:
        scfg = SlidingConfig(window_width=cfg.get_float("precursor", "window_width"),
                             step=cfg.get_float("precursor", "step"), delta_t=delta_t,
                             fit_lo=cfg.get_int("precursor", "fit_lo", 10),
                             fit_hi=cfg.get_int("precursor", "fit_hi"),
                             max_lag=cfg.get_int("precursor", "max_lag"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    ind = sliding_indicator(series, scfg, threads=run.threads)
    run.write_csv("indicator.csv", ["window_end", "var_omega", "lambda2", "L_over_dt", "r2", "valid"],
                  zip(ind.window_end, ind.var_omega, ind.lambda2, ind.L_over_dt, ind.r2, ind.valid))

    # plot export only: failed windows linearly interpolated and marked
    pos = np.arange(len(ind))
    plot = ind.var_omega.copy()
    plot[~ind.valid] = np.interp(pos[~ind.valid], pos[ind.valid], ind.var_omega[ind.valid])
    run.write_csv("indicator_plot.csv", ["window_end", "var_omega", "interpolated"],
                  zip(ind.window_end, plot, ~ind.valid))
    n_bad = int((~ind.valid).sum())
    if n_bad:
        run.warnings.append(f"{n_bad} of {len(ind)} windows failed the MRW fit")

    events = None
    if cfg.get("precursor", "events"):
        events = read_events(cfg.get("precursor", "events"))
    elif cfg.get("precursor", "index"):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            events = label_crashes(read_index(cfg.get("precursor", "index")),
                                   threshold=cfg.get_float("precursor", "threshold"),
                                   basis=cfg.get("precursor", "basis"))
        run.warnings.extend(str(w.message) for w in caught)
    if events is not None:
        run.write_csv("events.csv", ["date", "daily_return", "intraday_return"],
                      ((e.date, e.daily_return, e.intraday_return) for e in events))
        report = align_events(ind, events, cfg.get_int("precursor", "slope_window", 10))
        run.write_text("alignment.txt", report.to_text())


def _correlogram_out(run: Run, name: str, r):
    run.write_csv(name, ["lag", "value", "band"], ((k, v, r.band) for k, v in zip(r.lags, r.values)))


def cmd_acf(run: Run):
    cfg = run.cfg
    x, _ = read_series(cfg.get("correlogram", "input"), cfg.get("correlogram", "column"))
    _correlogram_out(run, "acf.csv", acf(x, cfg.get_int("correlogram", "max_lag", 20)))


def cmd_ccf(run: Run):
    cfg = run.cfg
    a, _ = read_series(cfg.get("correlogram", "input"), cfg.get("correlogram", "column"))
    b, _ = read_series(cfg.get("correlogram", "input_b"), cfg.get("correlogram", "column_b"))
    _correlogram_out(run, "ccf.csv", ccf(a, b, cfg.get_int("correlogram", "max_lag", 20)))


COMMANDS = {
    "ingest": cmd_ingest,
    "eigen": cmd_eigen,
    "simulate": cmd_simulate,
    "mrw-fit": cmd_mrw_fit,
    "precursor": cmd_precursor,
    "acf": cmd_acf,
    "ccf": cmd_ccf,
}

# flag dest -> (section, key) per subcommand; None entries are shared
_DELTA_T_KEY = {
    "ingest": ("data", "delta_t"),
    "eigen": ("eigen", "sliding_delta_t"),
    "simulate": ("mrw", "delta_t"),
    "mrw-fit": ("mrw", "delta_t"),
    "precursor": ("precursor", "delta_t"),
}

_FLAGS = {
    "out_dir": ("run", "out_dir"),
    "seed": ("run", "seed"),
    "threads": ("run", "threads"),
    "skip_open_minutes": ("data", "skip_open_minutes"),
    "bars": ("data", "bars"),
    "symbols": ("data", "symbols"),
    "sessions": ("data", "sessions"),
    "weights": ("eigen", "weights"),
    "global_weights": ("eigen", "global_weights"),
    "width_days": ("eigen", "width_days"),
    "step_days": ("eigen", "step_days"),
    "lambda2": ("mrw", "lambda2"),
    "L_over_dt": ("mrw", "L_over_dt"),
    "sigma": ("mrw", "sigma"),
    "length": ("mrw", "length"),
    "window_width": ("precursor", "window_width"),
    "step": ("precursor", "step"),
    "slope_window": ("precursor", "slope_window"),
    "events": ("precursor", "events"),
    "threshold": ("precursor", "threshold"),
    "basis": ("precursor", "basis"),
    "input_b": ("correlogram", "input_b"),
    "column_b": ("correlogram", "column_b"),
}

_SECTION_OF = {"ingest": "data", "eigen": "eigen", "simulate": "mrw", "mrw-fit": "mrw",
               "precursor": "precursor", "acf": "correlogram", "ccf": "correlogram"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI-style configuration file")
    common.add_argument("--out-dir")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--delta-t", type=float)
    common.add_argument("--skip-open-minutes", type=int)
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override any configuration key")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--bars", nargs="+", help="bar CSV files (date,time,symbol,price)")
    data.add_argument("--symbols", help="symbol list file, one symbol per line")
    data.add_argument("--sessions", help="e.g. '09:00-11:00, 12:30-15:00'")

    p = argparse.ArgumentParser(prog="marketmode", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"marketmode {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("ingest", parents=[common, data], help="price and de-seasonalized return panels")
    e = sub.add_parser("eigen", parents=[common, data], help="max-eigenvalue series, market mode, acf/ccf")
    e.add_argument("--index", help="daily index CSV for the eigenvalue/return cross-correlation")
    e.add_argument("--weights", action="store_const", const="true", help="write per-snapshot weights")
    e.add_argument("--global-weights", action="store_const", const="true",
                   help="one full-sample weight vector for the market mode")
    e.add_argument("--width-days", type=int)
    e.add_argument("--step-days", type=int)
    e.add_argument("--max-lag", type=int)

    s = sub.add_parser("simulate", parents=[common], help="simulate an MRW path")
    s.add_argument("--lambda2", type=float)
    s.add_argument("--L-over-dt", dest="L_over_dt", type=float)
    s.add_argument("--sigma", type=float)
    s.add_argument("--length", type=int)

    f = sub.add_parser("mrw-fit", parents=[common], help="fit lambda2 and L to a return series")
    f.add_argument("--series")
    f.add_argument("--column")
    f.add_argument("--max-lag", type=int)
    f.add_argument("--fit-lo", type=int)
    f.add_argument("--fit-hi", type=int)

    r = sub.add_parser("precursor", parents=[common], help="sliding Var(omega) indicator and crash alignment")
    r.add_argument("--series")
    r.add_argument("--column")
    r.add_argument("--window-width", type=float)
    r.add_argument("--step", type=float)
    r.add_argument("--fit-lo", type=int)
    r.add_argument("--fit-hi", type=int)
    r.add_argument("--max-lag", type=int)
    r.add_argument("--slope-window", type=int)
    r.add_argument("--index", help="daily index CSV: date,open,close,prev_close")
    r.add_argument("--events", help="events CSV: date,daily_return,intraday_return")
    r.add_argument("--threshold", type=float)
    r.add_argument("--basis", choices=["daily", "intraday"])

    for name in ("acf", "ccf"):
        c = sub.add_parser(name, parents=[common], help=f"{name} of CSV series")
        c.add_argument("--input")
        c.add_argument("--column")
        c.add_argument("--max-lag", type=int)
        if name == "ccf":
            c.add_argument("--input-b")
            c.add_argument("--column-b")
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config)
    own = _SECTION_OF[args.command]
    for dest, value in vars(args).items():
        if value is None or dest in ("command", "config", "set"):
            continue
        if dest == "delta_t":
            section, key = _DELTA_T_KEY.get(args.command, (own, "delta_t"))
            value = int(value) if float(value).is_integer() else value
        elif dest in _FLAGS:
            section, key = _FLAGS[dest]
        elif dest in ("index", "series", "column", "max_lag", "fit_lo", "fit_hi", "input"):
            section, key = own, dest
        else:
            continue
        if isinstance(value, list):
            value = ", ".join(value)
        cfg.set(section, key, value)
    for item in args.set:
        try:
            lhs, value = item.split("=", 1)
            section, key = lhs.strip().split(".", 1)
        except ValueError:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}") from None
        cfg.set(section, key, value)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"marketmode: config error: {exc}", file=sys.stderr)
        return EXIT_IO
    run = Run(args.command, cfg)
    status, code = "ok", EXIT_OK
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            COMMANDS[args.command](run)
        except (InputError, ConfigError, PanelError, OSError) as exc:
            status, code = f"error: {exc}", EXIT_IO
        except (ValueError, ArithmeticError) as exc:
            status, code = f"analysis failure: {exc}", EXIT_ANALYSIS
    run.warnings = [str(w.message) for w in caught] + run.warnings
    if code != EXIT_OK:
        print(f"marketmode {args.command}: {status}", file=sys.stderr)
    try:
        run.write_log(status)
    except OSError as exc:
        print(f"marketmode: cannot write run log: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
