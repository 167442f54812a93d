"""
Which log order? Ask the sublevel volumes
=========================================

For f = z1^2 z2^2 the point Q0 = (2, 2) is the only compact face of the
Newton polyhedron, so a face count gives log order 1.  The face is a
vertex, of codimension 2.  The volume of {|f| < r} decides: it behaves
like r^(2 c0) |log r|^(m0 - 1).

Each run below uses one seeded sample stream for the whole radius grid.
"""

import time

from cse_kit import assemble_report, parse_poly
from cse_kit.mc_verify import default_grid, fit_asymptotics, sublevel_volumes

grid = default_grid()            # 2^-4 ... 2^-14
for text in ("z1", "z1 z2", "z1^2 z2^2"):
    n = 1 if text == "z1" else 2
    f = parse_poly(text, n)
    rep = assemble_report(f)
    t0 = time.perf_counter()
    est = sublevel_volumes(f, None, grid, samples=10**7, seed=0)
    fit = fit_asymptotics(est.radii, est.volume, est.stderr, n=n)
    print(f"{text:>10}:  predicted (2c0, m0-1) = ({2 * rep.c0}, {rep.m0 - 1})"
          f"  [face-count m0 = {rep.m0_faces or '-'}]"
          f"   fitted ({fit.p:.3f}, {fit.q})   {time.perf_counter() - t0:.1f}s")

###############################################################################
# The fit picks the integer q with the smallest residual.  Here are the
# residuals for the last case.

print({q: f"{r:.3g}" for q, r in fit.residuals_by_q.items()})

###############################################################################
# The same estimates as CSV, ready for any plotting tool.

print(est.to_csv())
