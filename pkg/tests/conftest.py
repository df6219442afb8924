import datetime as dt
from pathlib import Path

import numpy as np
import pytest

from marketmode.panel import ReturnPanel

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def make_returns(values, start=dt.date(2008, 1, 7), delta_t=1):
    """ReturnPanel from an array shaped (symbols, days, slots)."""
    values = np.asarray(values, dtype=float)
    n, n_days, n_slots = values.shape
    days = [start + dt.timedelta(d) for d in range(n_days)]
    return ReturnPanel(
        symbols=[f"S{i}" for i in range(n)],
        days=days,
        values=values.reshape(n, n_days * n_slots),
        day_index=np.repeat(np.arange(n_days), n_slots),
        slot_index=np.tile(np.arange(n_slots), n_days),
        slot_labels=[f"{9 + s // 60:02d}:{s % 60:02d}" for s in range(n_slots)],
        delta_t=delta_t,
    )


def write_bars(path, rows):
    with open(path, "w") as fh:
        fh.write("date,time,symbol,price\n")
        for r in rows:
            fh.write(",".join(str(v) for v in r) + "\n")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one PASS/FAIL line per acceptance criterion, printed after the run
_CRITERIA: list[tuple[str, str, bool, float]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None and rep.when == "call":
        _CRITERIA.append((str(mark.args[0]), mark.args[1], rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, seconds in sorted(_CRITERIA):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {number}: {title} "
                                    f"({seconds:.1f} s)")
