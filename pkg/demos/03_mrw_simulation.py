"""
Simulating a multifractal random walk
=====================================

Exact sampling of the log-volatility by circulant embedding, then the
scaling of absolute moments with the aggregation time.
"""

import numpy as np

from marketmode import MrwParams, fit_zeta, moment_scaling, omega_covariance, simulate, zeta_model

params = MrwParams.from_ratio(lambda2=0.05, L_over_dt=1024)
print("Var(omega) =", round(params.var_omega, 4))

####################################################################
# One path
# --------
# Increments are uncorrelated while their magnitudes cluster.

path = simulate(params, 2**17, seed=1)
x = path.values
print("lag-1 correlation of increments:", np.corrcoef(x[:-1], x[1:])[0, 1].round(4))
a = np.abs(x)
print("lag-10 correlation of |increments|:", np.corrcoef(a[:-10], a[10:])[0, 1].round(3))

d = path.omega + params.var_omega
for k in (1, 10, 100, 2000):
    print(f"omega cov at lag {k:5d}: sample {np.mean(d[:-k] * d[k:]):+.4f}  model {omega_covariance(k, params):+.4f}")

####################################################################
# Moment scaling
# --------------
# Several independent paths are pooled; high moments need many samples.

X = np.array([simulate(params, 2**17, seed=[2, r]).values for r in range(32)])
ms = moment_scaling(X)
for q, z in zip(ms.q, ms.zeta):
    print(f"q={q:.0f}  zeta={z:.3f}  model={zeta_model(q, params.lambda2):.3f}")
print("fitted lambda2:", round(fit_zeta(ms).lambda2, 4))
