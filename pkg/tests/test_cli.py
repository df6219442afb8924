import datetime as dt
import json
import subprocess
import sys

import numpy as np
import pytest

from marketmode.cli import main, read_index, read_series
from marketmode.config import ConfigError, RunConfig

from conftest import DATA, GOLDEN, write_bars

EIGEN_ARGS = ["eigen", "--bars", str(DATA / "bars.csv"), "--symbols", str(DATA / "symbols.txt")]
PRECURSOR_ARGS = ["precursor", "--series", str(DATA / "mm_series.csv"),
                  "--events", str(DATA / "events.csv")]


def minute_bars(symbols, days, rng, drop=()):
    rows = []
    minutes = [9 * 60 + m for m in range(121)] + [12 * 60 + 30 + m for m in range(151)]
    for day in days:
        for sym in symbols:
            logp = np.log(1000.0) + np.cumsum(1e-3 * rng.standard_normal(len(minutes)))
            for m, lp in zip(minutes, logp):
                t = f"{m // 60:02d}:{m % 60:02d}"
                if (day, t, sym) not in drop:
                    rows.append((day, t, sym, round(float(np.exp(lp)), 4)))
    return rows


def log_of(out):
    return (out / "run.log").read_text()


# ---------------------------------------------------------------------------
# configuration


def test_config_round_trip_is_canonical():
    cfg = RunConfig()
    cfg.set("mrw", "lambda2", "0.03")
    again = RunConfig.from_text(cfg.to_text())
    assert again == cfg
    assert again.to_text() == cfg.to_text()
    assert again.digest() == cfg.digest()
    assert RunConfig().digest() != cfg.digest()


def test_config_rejects_unknown_keys_and_types():
    with pytest.raises(ConfigError, match="unknown config key"):
        RunConfig.from_text("[mrw]\nlambda = 1\n")
    with pytest.raises(ConfigError, match="section"):
        RunConfig.from_text("[nope]\na = 1\n")
    cfg = RunConfig.from_text("[run]\nthreads = many\n")
    with pytest.raises(ConfigError, match="expected int"):
        cfg.get_int("run", "threads")
    with pytest.raises(ConfigError):
        RunConfig.from_text("not an ini file")


def test_flags_override_config_and_set_overrides_flags(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[mrw]\nlambda2 = 0.02\nlength = 64\n")
    out = tmp_path / "o"
    code = main(["simulate", "--config", str(ini), "--lambda2", "0.04", "--out-dir", str(out),
                 "--set", "mrw.length=128", "--delta-t", "5"])
    assert code == 0
    saved = RunConfig.from_text((out / "config.ini").read_text())
    assert saved.get("mrw", "lambda2") == "0.04"
    assert saved.get("mrw", "length") == "128"
    assert saved.get("mrw", "delta_t") == "5"
    assert f"config_sha256 = {saved.digest()}" in log_of(out)


def test_missing_config_file_is_an_io_error(tmp_path, capsys):
    missing = tmp_path / "missing.ini"
    assert main(["simulate", "--config", str(missing), "--out-dir", str(tmp_path)]) == 2
    assert str(missing) in capsys.readouterr().err


def test_bad_set_syntax(tmp_path, capsys):
    assert main(["simulate", "--set", "lambda2", "--out-dir", str(tmp_path)]) == 2
    assert "SECTION.KEY=VALUE" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# ingest


def test_ingest_writes_price_and_return_panels(tmp_path):
    rng = np.random.default_rng(0)
    days = ["2008-10-01", "2008-10-02", "2008-10-03"]
    bars = write_bars(tmp_path / "bars.csv", minute_bars(["A", "B"], days, rng,
                                                         drop={("2008-10-02", "13:15", "B")}))
    (tmp_path / "symbols.txt").write_text("A\nB\n")
    out = tmp_path / "out"
    code = main(["ingest", "--bars", str(bars), "--symbols", str(tmp_path / "symbols.txt"),
                 "--out-dir", str(out), "--delta-t", "5"])
    assert code == 0
    prices = (out / "prices.csv").read_text().splitlines()
    returns = (out / "returns_dt5.csv").read_text().splitlines()
    assert prices[0] == "timestamp,A,B"
    assert returns[0] == "timestamp,A,B"
    assert len(prices) == 1 + 3 * 242
    assert len(returns) == 1 + 3 * (241 // 5)
    assert prices[1].startswith("2008-10-01 09:30,")
    log = log_of(out)
    assert "status = ok" in log
    assert "warnings = 1" in log
    assert "B on 2008-10-02" in log


def test_ingest_reports_malformed_row(tmp_path, capsys):
    bars = write_bars(tmp_path / "bars.csv", [("2008-10-01", "09:00", "A", 100),
                                              ("2008-10-01", "9am", "A", 101)])
    (tmp_path / "s.txt").write_text("A\n")
    code = main(["ingest", "--bars", str(bars), "--symbols", str(tmp_path / "s.txt"),
                 "--out-dir", str(tmp_path / "o")])
    assert code == 2
    assert "bars.csv:3" in capsys.readouterr().err
    assert "status = error" in log_of(tmp_path / "o")


def test_missing_input_file(tmp_path, capsys):
    code = main(["mrw-fit", "--series", str(tmp_path / "nope.csv"), "--out-dir", str(tmp_path)])
    assert code == 2
    assert "nope.csv" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# simulate, mrw-fit, correlograms


def test_simulate_is_seed_deterministic(tmp_path):
    args = ["simulate", "--length", "4096", "--lambda2", "0.03", "--L-over-dt", "256"]
    assert main(args + ["--seed", "7", "--out-dir", str(tmp_path / "a")]) == 0
    assert main(args + ["--seed", "7", "--out-dir", str(tmp_path / "b")]) == 0
    assert main(args + ["--seed", "8", "--out-dir", str(tmp_path / "c")]) == 0
    a = (tmp_path / "a" / "mrw_path.csv").read_bytes()
    assert a == (tmp_path / "b" / "mrw_path.csv").read_bytes()
    assert a != (tmp_path / "c" / "mrw_path.csv").read_bytes()
    assert a.startswith(b"index,delta_x,omega\n0,")


def test_simulate_without_intermittency_is_white(tmp_path):
    out = tmp_path / "o"
    assert main(["simulate", "--length", "8192", "--lambda2", "0", "--out-dir", str(out)]) == 0
    x, stamps = read_series(str(out / "mrw_path.csv"))
    assert len(x) == 8192 and stamps[0] == "0"
    assert abs(np.corrcoef(x[:-1], x[1:])[0, 1]) < 3 / np.sqrt(len(x))
    assert np.std(x) == pytest.approx(1.0, rel=0.05)


def test_simulate_rejects_bad_parameters(tmp_path, capsys):
    assert main(["simulate", "--lambda2", "-1", "--out-dir", str(tmp_path)]) == 2
    assert "lambda2" in capsys.readouterr().err


def test_mrw_fit_report(tmp_path):
    sim = tmp_path / "sim"
    assert main(["simulate", "--length", "32768", "--lambda2", "0.03", "--L-over-dt", "256",
                 "--seed", "1", "--out-dir", str(sim)]) == 0
    out = tmp_path / "fit"
    assert main(["mrw-fit", "--series", str(sim / "mrw_path.csv"), "--max-lag", "256",
                 "--fit-hi", "256", "--out-dir", str(out)]) == 0
    rep = json.loads((out / "mrw_fit.json").read_text())
    for key in ("lambda2", "L_over_dt", "L", "var_omega", "r2", "fit_range", "zero_crossing",
                "zero_exclusions", "n", "zeta"):
        assert key in rep
    assert rep["lambda2"] == pytest.approx(0.03, rel=0.3)
    assert rep["fit_range"] == [10, 256]
    assert (out / "log_abs_cov.csv").read_text().startswith("lag,cov\n1,")
    assert (out / "moments.csv").exists()


def test_mrw_fit_outside_lag_range_is_an_analysis_failure(tmp_path, capsys):
    src = tmp_path / "x.csv"
    np.savetxt(src, np.random.default_rng(3).standard_normal(4000))
    code = main(["mrw-fit", "--series", str(src), "--max-lag", "100", "--fit-lo", "500",
                 "--out-dir", str(tmp_path / "o")])
    assert code == 1
    assert "analysis failure" in capsys.readouterr().err


def test_acf_and_ccf_commands(tmp_path):
    rng = np.random.default_rng(4)
    a = rng.standard_normal(500)
    b = np.roll(a, 2)
    for name, v in (("a.csv", a), ("b.csv", b)):
        (tmp_path / name).write_text("value\n" + "\n".join(f"{x:.12g}" for x in v) + "\n")
    out = tmp_path / "o"
    assert main(["acf", "--input", str(tmp_path / "a.csv"), "--max-lag", "5", "--out-dir", str(out)]) == 0
    rows = (out / "acf.csv").read_text().splitlines()
    assert rows[0] == "lag,value,band" and rows[1].startswith("0,1,") and len(rows) == 7
    assert main(["ccf", "--input", str(tmp_path / "a.csv"), "--input-b", str(tmp_path / "b.csv"),
                 "--max-lag", "4", "--out-dir", str(out)]) == 0
    ccf_rows = [r.split(",") for r in (out / "ccf.csv").read_text().splitlines()[1:]]
    assert len(ccf_rows) == 9
    best = max(ccf_rows, key=lambda r: float(r[1]))
    assert best[0] == "2"


def test_read_index_chains_previous_close(tmp_path):
    p = tmp_path / "idx.csv"
    p.write_text("date,open,close,prev_close\n2008-10-15,100,98,\n2008-10-16,97,90,\n")
    rows = read_index(str(p))
    assert rows[0] == (dt.date(2008, 10, 15), 100.0, 98.0, None)
    assert rows[1][3] == 98.0


def test_precursor_labels_events_from_index(tmp_path):
    x, _ = read_series(str(DATA / "mm_series.csv"))
    first = dt.date(1990, 1, 1)
    series = tmp_path / "mm.csv"
    series.write_text("timestamp,value\n" + "".join(
        f"{first + dt.timedelta(i)},{v:.12g}\n" for i, v in enumerate(x)))
    crash = first + dt.timedelta(7000)
    idx = tmp_path / "idx.csv"
    idx.write_text(f"date,open,close,prev_close\n{crash - dt.timedelta(1)},100,100,100\n"
                   f"{crash},100,93,\n")
    out = tmp_path / "o"
    code = main(["precursor", "--series", str(series), "--index", str(idx), "--out-dir", str(out)])
    assert code == 0
    events = (out / "events.csv").read_text().splitlines()
    assert len(events) == 2 and events[1].startswith(f"{crash},")
    assert "/1 =" in (out / "alignment.txt").read_text()


# ---------------------------------------------------------------------------
# determinism


@pytest.mark.parametrize("threads", [1, 4])
@pytest.mark.parametrize("args,golden", [(EIGEN_ARGS, "eigen"), (PRECURSOR_ARGS, "precursor")])
def test_golden_outputs(tmp_path, args, golden, threads):
    out = tmp_path / "out"
    assert main(args + ["--threads", str(threads), "--out-dir", str(out)]) == 0
    files = sorted(p.name for p in (GOLDEN / golden).iterdir())
    assert len(files) >= 4
    for name in files:
        assert (out / name).read_bytes() == (GOLDEN / golden / name).read_bytes(), name


def test_rerun_is_idempotent(tmp_path):
    out = tmp_path / "out"
    assert main(PRECURSOR_ARGS + ["--out-dir", str(out)]) == 0
    first = {p.name: p.read_bytes() for p in out.iterdir()}
    assert main(PRECURSOR_ARGS + ["--out-dir", str(out)]) == 0
    assert {p.name: p.read_bytes() for p in out.iterdir()} == first


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "marketmode", "simulate", "--length", "64",
                          "--out-dir", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "mrw_path.csv").exists()
