"""
When the Newton distance is the wrong guide
===========================================

Take rho(x, y) = x^8 + x^4 y^2 + x^2 y^6 + y^10 on C (z = x + iy) and the
domain Im w > rho(z).  Its real Newton distance is d0 = 10/3, while the
lowest half-degree is delta = 3.  The slices {rho < t} are not Reinhardt,
so we compute the planar Bergman kernel at the origin directly.  It takes
about half a minute.
"""

import time

import numpy as np

from cse_kit.exponents import real_series_data
from cse_kit.mc_verify import kernel_bound_check, mc_planar_area
from cse_kit.polyparse import parse_real_series

rho = parse_real_series("x^8+x^4y^2+x^2y^6+y^10")
info = real_series_data(rho)
print("d0 =", info["d0"], "  delta =", info["delta"])
print("kernel law from delta:      ", info["kernel_law"].render("K"))
print("from the Newton distance:   ", info["literal_law"].render("K"))

t0 = time.perf_counter()
chk = kernel_bound_check(rho)
print(f"\nfitted kernel exponent {chk.fit.p:.3f} ({time.perf_counter() - t0:.0f}s)")
print(f"1/Vol alone gives {chk.extra['inverse_volume_fit']['p_hat']:.3f}, a lower bound only")
print("K >= 1/Vol on every slice:", chk.extra["kernel_ge_inverse_volume"])
print(f"largest relative change over the last half of the degrees: {chk.extra['max_relative_change']:.1e}")

###############################################################################
# The quadrature areas against plain hit-or-miss sampling.

for t, vol in zip(chk.t_grid[::2], chk.volumes[::2]):
    a, se = mc_planar_area(rho, t, samples=10**6, seed=0)
    print(f"t={t:.0e}: quadrature {vol:.6e}   MC {a:.6e} +- {se:.1e}")
print("t^(7/3) K:", np.round(np.array(chk.kernel) * np.array(chk.t_grid) ** (7 / 3), 4))
