"""
Resolution charts and the model integral
========================================

A chart (a_j, b_j, c_j) says |F o mu| ~ prod |z_j|^a_j, |J_mu| ~ prod |z_j|^b_j
and |mu_1| ~ prod |z_j|^c_j.  The exponent is the first pole of the
associated Mellin integral and the log order its multiplicity.
"""

import math

import numpy as np

from cse_kit.charts import chart_asymptotic, cse_from_charts, h_poles, itilde_exact
from cse_kit.mc_verify import fit_asymptotics

identity = [(1, 0, 0), (1, 0, 0)]
beta, alpha = cse_from_charts([identity])
print("poles:", [(str(loc), m) for loc, m in h_poles(identity)], f" beta = {beta}, alpha = {alpha}")

###############################################################################
# For the identity chart the integral is known in closed form.

for t in (1e-1, 1e-2, 1e-3, 1e-4):
    exact = t * t / 4 + t * t / 2 * math.log(1 / t)
    print(f"t={t:g}: {itilde_exact(identity, 0, t):.15e}  closed form {exact:.15e}")

###############################################################################
# Slopes of log I(t) recover 2*beta, and the integer log power alpha - 1.

ts = np.geomspace(1e-3, 1e-6, 13)
for chart in (identity, [(2, 1, 0), (3, 0, 1)], [(2, 0, 0), (2, 0, 0), (1, 1, 0)]):
    for tau in (0, 1):
        law, _ = chart_asymptotic([chart], tau)
        fit = fit_asymptotics(ts, [itilde_exact(chart, tau, t) for t in ts], n=len(chart))
        print(f"{chart} tau={tau}: law ({law.power}, {law.logpow})  fit ({fit.p:.3f}, {fit.q})")
