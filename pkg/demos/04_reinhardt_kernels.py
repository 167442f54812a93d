"""
Kernel exponents on Reinhardt models
====================================

When every slice {rho < t} is a complete Reinhardt domain, K at its centre
is exactly 1/Vol, and the product reduction gives
K((0, w)) ~ (Im w)^-2 / Vol{rho < Im w}.
"""

import math

from cse_kit.mc_verify import ReinhardtModel, kernel_bound_check, volume_grid

siegel = ReinhardtModel((1,))                 # rho = |z1|^2
ball = ReinhardtModel((1, 2), 0.5)            # rho = (|z1|^2 + |z2|^4)^(1/2)

###############################################################################
# Closed-form slice volumes against Monte Carlo.

for s in (0.3, 0.1, 0.03):
    exact = 2 * math.pi**2 / 3 * s**3
    est = volume_grid(ball, 2, [s], samples=10**6, seed=1, box_radius=1.01 * s**0.5, mode="uniform")
    print(f"s={s}: exact {exact:.6e}  MC {est.volume[0]:.6e} +- {est.stderr[0]:.1e}")

###############################################################################
# Fitted kernel exponents, with the three one-sided volume bounds for c < c0.

for name, model in (("Siegel", siegel), ("ball", ball)):
    for source in ("exact", "mc"):
        chk = kernel_bound_check(model, volumes=source, samples=10**6, seed=2)
        print(f"{name:>6} [{source:>5}]: fit {chk.fit.p:.3f}  target {chk.target.power}"
              f"  bounds {[ok for _, ok in chk.bound_checks]}")
