"""
A volatility-of-volatility indicator before crashes
===================================================

The sliding estimate of ``Var(omega) = lambda2 log(L/dt)`` on a series
whose intermittency steps up half way, and the alignment of crash days
with the indicator's local trend.
"""

import numpy as np

from marketmode import (
    MrwParams,
    SlidingConfig,
    align_events,
    label_crashes,
    simulate,
    sliding_indicator,
)

n = 20_000
calm = simulate(MrwParams.from_ratio(0.01, 512, delta_t=5), n, seed=[0, 0]).values
rough = simulate(MrwParams.from_ratio(0.05, 512, delta_t=5), n, seed=[0, 1]).values
x = np.concatenate([calm, rough])

####################################################################
# Sliding estimate
# ----------------
# Windows are 20000 minutes wide and advance by one trading day.

cfg = SlidingConfig()
ind = sliding_indicator(x, cfg, threads=4)
e = ind.end_index
print("windows:", len(ind), " valid:", int(ind.valid.sum()))
pre = ind.valid & (e < n)
post = ind.valid & (e - cfg.window_samples + 1 >= n)
print("mean before:", np.mean(ind.var_omega[pre]).round(3), " after:", np.mean(ind.var_omega[post]).round(3))

####################################################################
# Crash days and trend alignment
# ------------------------------
# A toy daily index: one day loses 7%. Its date is a sample index here.

crash_at = int(e[np.nonzero(post)[0][0]]) + 1
index = [(crash_at - 1, 100.0, 100.0, 100.0), (crash_at, 99.0, 93.0, 100.0)]
events = label_crashes(index)
print("labelled:", [(ev.date, round(ev.daily_return, 3)) for ev in events])
rising = int(np.sum(ind.valid & (e >= n) & (e < crash_at)))
print(align_events(ind, events, slope_window=rising).to_text())
