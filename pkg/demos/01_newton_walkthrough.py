"""
Exponents from a Newton polyhedron
==================================

We take f = z1^4 + z1^2 z2 + z1 z2^2 + z2^4 and read off the complex
singularity exponent, its log order, and the boundary laws of the Bergman
kernel on Im w > |f(z)|^2.
"""

from cse_kit import assemble_report, parse_poly
from cse_kit.exponents import weighted_cse, weighted_cse_newton
from cse_kit.newton import diagonal_by_bisection, diagonal_intersection, newton_polyhedron

f = parse_poly("z1^4 + z1^2*z2 + z1*z2^2 + z2^4", 2)
N = newton_polyhedron(f)

print("vertices:", N.vertices)
for w in N.compact_facets:
    print("compact facet  <%s, x> >= 1" % ", ".join(map(str, w)))

###############################################################################
# The weighted diagonal t*(1+tau, 1) leaves the polyhedron at d_tau.  The
# facet formula and a plain bisection on membership agree exactly.

for tau in range(3):
    D = diagonal_intersection(N, tau, 1)
    print(f"tau={tau}: d = {D.d} (bisection {diagonal_by_bisection(N, tau, 1)}), "
          f"Q = {tuple(map(str, D.Q))}, faces through Q = {D.compact_face_count}, "
          f"codim = {D.minimal_face_codim}")

###############################################################################
# 1/d2 = 5/4 is above 1.  The zero set of f meets the torus, and there
# |z1|^4 |f|^(-2c) stops being integrable at c = 1, so the weighted
# exponent used downstream is capped.

c2, m2 = weighted_cse(f, 1, 2)
print(f"1/d2 = {weighted_cse_newton(f, 1, 2)}   capped: c2 = {c2}, m2 = {m2}")

###############################################################################
# The full report.  Text mode mirrors what ``cse-kit analyze --format text``
# prints.

report = assemble_report(f)
print()
print(report.render_text())
