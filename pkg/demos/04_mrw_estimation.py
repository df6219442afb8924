"""
Estimating intermittency and integral scale
===========================================

The covariance of log absolute increments decays like
``lambda2 (log(L/dt) - log k)``; a straight-line fit against ``log k``
gives both parameters.
"""

import math

import numpy as np

from marketmode import MrwParams, estimate_params, log_abs_cov, simulate

true = MrwParams.from_ratio(lambda2=0.014, L_over_dt=1024)
fits = []
for seed in range(10):
    x = simulate(true, 2**17, seed=seed).values
    cov = log_abs_cov(x, 1024)
    fits.append(estimate_params(cov, (10, 1024)))

####################################################################
# The fitted line on one path
# ---------------------------

cov = log_abs_cov(simulate(true, 2**17, seed=0).values, 1024)
f = fits[0]
for k in (10, 30, 100, 300, 1000):
    model = f.lambda2 * (math.log(f.L_over_dt) - math.log(k))
    print(f"lag {k:4d}: sample {cov.cov[k - 1]:+.4f}  fitted {model:+.4f}")

####################################################################
# Spread over seeds
# -----------------

lam = np.array([f.lambda2 for f in fits])
logL = np.array([f.diagnostics["log_L_over_dt"] for f in fits])
print("lambda2: median", np.median(lam).round(4), "range", lam.min().round(4), lam.max().round(4))
print("ln L/dt: median", np.median(logL).round(2), "true", round(math.log(1024), 2))
