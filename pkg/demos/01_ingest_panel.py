"""
Minute bars to de-seasonalized returns
======================================

Synthetic minute bars for three stocks over five days are written to a
temporary CSV, aligned on the Tokyo intraday grid and turned into
log-returns divided by their time-of-day volatility.
"""

import tempfile
import warnings
from pathlib import Path

import numpy as np

from marketmode import GridSpec, build_seasonal_profile, deseasonalize, load_panel, log_returns

rng = np.random.default_rng(1)

####################################################################
# Write a bar file
# ----------------
# Volatility is U-shaped over the day, as on real exchanges. One bar is
# removed to show gap filling.

grid = GridSpec()
minutes = grid.minutes()
print("grid minutes per day:", len(minutes))

rows = []
for day in ["2008-10-06", "2008-10-07", "2008-10-08", "2008-10-09", "2008-10-10"]:
    for sym in ["7203", "6758", "8306"]:
        pos = np.linspace(-1, 1, len(minutes))
        vol = 1e-3 * (1 + 2 * pos**2)
        price = 1000 * np.exp(np.cumsum(vol * rng.standard_normal(len(minutes))))
        for m, p in zip(minutes, price):
            rows.append(f"{day},{m // 60:02d}:{m % 60:02d},{sym},{p:.2f}")
rows.remove(next(r for r in rows if r.startswith("2008-10-07,10:15,6758")))

tmp = Path(tempfile.mkdtemp())
bars = tmp / "bars.csv"
bars.write_text("date,time,symbol,price\n" + "\n".join(rows) + "\n")

####################################################################
# Load and difference
# -------------------

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    panel = load_panel([bars], ["7203", "6758", "8306"])
for w in caught:
    print("warning:", w.message)
print("price grid:", panel.grid.shape)

ret1 = log_returns(panel, delta_t=1)
ret5 = log_returns(panel, delta_t=5)
print("1-minute returns:", ret1.values.shape, " 5-minute returns:", ret5.values.shape)

####################################################################
# Remove the intraday pattern
# ---------------------------
# After division by the seasonal profile every slot has unit variance
# across days.

profile = build_seasonal_profile(ret1)
print("profile at open, midday, close:", profile.values[0, [0, 100, -1]].round(5))
clean = deseasonalize(ret1, profile)
print("std of de-seasonalized returns per symbol:", clean.values.std(axis=1).round(3))
