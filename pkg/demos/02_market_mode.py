"""
The largest eigenvalue and the market mode
==========================================

A one-factor panel whose factor loading doubles half way through. The
largest eigenvalue of the daily correlation matrix jumps with it, and
the projection on the first principal component recovers the factor.
"""

import datetime as dt

import numpy as np

from marketmode import (
    PER_DAY,
    ReturnPanel,
    acf,
    ccf,
    market_mode,
    rolling_eigenvalues,
)

rng = np.random.default_rng(7)
N, days, slots = 50, 30, 240

factor = rng.standard_normal((days, slots))
loading = np.where(np.arange(days) < 15, 0.3, 0.6)[:, None]
x = loading * factor + rng.standard_normal((N, days, slots))

panel = ReturnPanel(
    symbols=[f"S{i:02d}" for i in range(N)],
    days=[dt.date(2008, 9, 1) + dt.timedelta(d) for d in range(days)],
    values=x.reshape(N, -1),
    day_index=np.repeat(np.arange(days), slots),
    slot_index=np.tile(np.arange(slots), days),
    slot_labels=[f"{9 + s // 60:02d}:{s % 60:02d}" for s in range(slots)],
    delta_t=1,
)

####################################################################
# Day-by-day eigenvalues
# ----------------------
# Expected level is ``1 + N b^2 / (1 + b^2)`` for loading ``b``.

snaps = rolling_eigenvalues(panel, PER_DAY, threads=4)
lam = np.array([s.max_eigenvalue for s in snaps])
for b in (0.3, 0.6):
    print(f"loading {b}: expected {1 + N * b * b / (1 + b * b):.2f}")
print("first half mean:", lam[:15].mean().round(2), " second half mean:", lam[15:].mean().round(2))

####################################################################
# Persistence of the eigenvalue series
# ------------------------------------

r = acf(lam, 5)
print("acf:", r.values.round(2), " band:", round(r.band, 3))
c = ccf(lam, np.abs(factor.mean(axis=1)), 3)
print("ccf lags:", c.lags, "values:", c.values.round(2))

####################################################################
# Market mode series
# ------------------

mm = market_mode(panel, block_days=5)
print("correlation with the hidden factor:", np.corrcoef(mm.values, factor.ravel())[0, 1].round(3))
