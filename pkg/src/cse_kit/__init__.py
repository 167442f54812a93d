"""Complex singularity exponents, Newton polyhedra and Bergman kernel asymptotics
for model domains ``Im w > |F(z)|^2``."""

__version__ = "0.1.0"

from .charts import ChartData, cse_from_charts, itilde
from .exponents import (AsymptoticLaw, NeedsChartsError, SingularityReport, assemble_report,
                        cse_newton, curvature_classification, kernel_law, log_order,
                        weighted_cse, weighted_cse_newton)
from .newton import diagonal_intersection, newton_polyhedron
from .nondegeneracy import is_nondegenerate
from .polyparse import SparsePolynomial, format_poly, parse_map, parse_point, parse_poly, recenter

__all__ = [
    "AsymptoticLaw", "ChartData", "NeedsChartsError", "SingularityReport", "SparsePolynomial",
    "assemble_report", "cse_from_charts", "cse_newton", "curvature_classification",
    "diagonal_intersection", "format_poly", "is_nondegenerate", "itilde", "kernel_law",
    "log_order", "newton_polyhedron", "parse_map", "parse_point", "parse_poly", "recenter",
    "weighted_cse", "weighted_cse_newton",
]
