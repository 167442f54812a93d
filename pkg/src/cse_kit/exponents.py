"""Complex singularity exponents, log orders and the boundary laws they imply.

Conventions (see the README for the reasoning):

* ``c0`` is the L2 exponent: the supremum of ``c`` with ``|F|^-c`` square
  integrable near the base point.  ``lct = 2 * c0`` is the L1 threshold.
* Sublevel volumes behave like ``Vol{|F| < s} ~ s^(2 c0) |log s|^(m0 - 1)``.
* The operative log order of a Newton point is the codimension of the
  smallest face of Gamma(f) containing it; the literal face count
  ``min(m_hat, n)`` is reported alongside.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .charts import ChartData, cse_from_charts
from .gaussq import QQi
from .newton import build_polyhedron, diagonal_intersection, frac_str, newton_polyhedron
from .nondegeneracy import Status, is_nondegenerate
from .polyparse import RealSeries, SparsePolynomial, format_poly, real_delta, recenter

VARIABLES = ("r_to_0", "Imw_to_0")


class NeedsChartsError(ValueError):
    """Newton formulas do not apply and no resolution chart data was given."""


class InternalInconsistencyError(ArithmeticError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class AsymptoticLaw:
    """``A(x) ~ x^power |log x|^logpow`` as ``x -> 0``."""

    power: Fraction
    logpow: int
    variable: str = "r_to_0"
    epsilon_caveat: bool = False

    def __post_init__(self):
        object.__setattr__(self, "power", Fraction(self.power))
        object.__setattr__(self, "logpow", int(self.logpow))
        if self.variable not in VARIABLES:
            raise ValueError(f"variable must be one of {VARIABLES}")

    def render(self, quantity: str = "K") -> str:
        base, lg = ("r", "r") if self.variable == "r_to_0" else ("(Im w)", "Im w")
        eps = " ± ε" if self.epsilon_caveat else ""
        return f"{quantity} ≍ {base}^({self.power}{eps}) · |log {lg}|^{self.logpow}"

    def to_dict(self) -> dict:
        return {"power": frac_str(self.power), "logpow": self.logpow,
                "variable": self.variable, "epsilon": self.epsilon_caveat}

    @classmethod
    def from_dict(cls, d: dict) -> "AsymptoticLaw":
        return cls(_frac(d["power"]), int(d["logpow"]), d["variable"], bool(d["epsilon"]))


class Curvature(enum.Enum):
    TENDS_TO_TWO = "TendsToTwo"
    BOUNDED_BELOW = "BoundedBelow"
    UNBOUNDED_BELOW = "UnboundedBelow"


# ---------------------------------------------------------------------------
# Newton route

def _check_newton_input(f: SparsePolynomial):
    if f.is_zero():
        raise ValueError("zero polynomial")
    if not f.vanishes_at_origin():
        raise ValueError("f(0) must vanish; recenter first")


def cse_newton(f: SparsePolynomial) -> tuple[Fraction, list[str]]:
    """``c0(|f|) = 1/d0`` with warnings when the Newton hypotheses fail."""
    _check_newton_input(f)
    warnings = []
    N = newton_polyhedron(f)
    d0 = diagonal_intersection(N, 0).d
    verdict = is_nondegenerate(f)
    if verdict.status is not Status.NONDEGENERATE:
        warnings.append(f"nondegeneracy: {verdict.describe()}")
    if d0 <= 1:
        warnings.append(f"d0 = {d0} <= 1: the Newton-distance formula is outside its hypothesis")
    if d0 < 1:
        # a single function never has c0 above 1
        return Fraction(1), warnings
    return 1 / d0, warnings


def weighted_cse_newton(f: SparsePolynomial, j: int, tau: int) -> Fraction:
    """``1/d_tau`` for the weighted diagonal on axis ``j``.

    This is the weighted exponent ``c0(|f|; |z_j|^tau)`` whenever it is
    below 1; see :func:`weighted_cse` for the capped value used in reports.
    """
    _check_newton_input(f)
    return 1 / diagonal_intersection(newton_polyhedron(f), tau, j).d


def log_order(f: SparsePolynomial, j: int, tau: int) -> tuple[int, int]:
    """``(min(m_hat, n), codimension of the minimal face)`` at ``Q_tau``."""
    _check_newton_input(f)
    D = diagonal_intersection(newton_polyhedron(f), tau, j)
    return min(D.compact_face_count, f.n), D.minimal_face_codim


def curvature_classification(f: SparsePolynomial, j: int = 1):
    """Exact convexity test ``1/d2 + 1/d0`` versus ``2/d1``.

    Returns ``(Curvature, lhs, rhs, warnings)``.  Strict inequality means the
    three diagonal points do not share a supporting hyperplane and the
    curvature tends to 2; equality means it stays bounded below.
    """
    _check_newton_input(f)
    N = newton_polyhedron(f)
    d = [diagonal_intersection(N, tau, j).d for tau in range(3)]
    lhs, rhs = 1 / d[2] + 1 / d[0], 2 / d[1]
    warnings = []
    if d[0] <= 1:
        warnings.append("d0 <= 1: classification outside its hypothesis")
    verdict = is_nondegenerate(f)
    if verdict.status is not Status.NONDEGENERATE:
        warnings.append(f"nondegeneracy: {verdict.describe()}")
    if lhs > rhs:
        raise InternalInconsistencyError(f"convexity violated: {lhs} > {rhs}")
    cls = Curvature.TENDS_TO_TWO if lhs < rhs else Curvature.BOUNDED_BELOW
    return cls, lhs, rhs, warnings


# ---------------------------------------------------------------------------
# laws

def kernel_law(c0, l: int = 1, *, model: str = "F") -> AsymptoticLaw:
    """Bergman kernel growth at a boundary point.

    ``model="F"``: the domain ``Im w > |F|^2`` with ``c0 = c0(|F|)`` and log
    order ``l``.  ``model="rho"``: ``Im w > rho`` for log-psh ``rho`` with
    ``c0 = c0(rho)``; only the power is determined, up to any ε.
    """
    c0 = Fraction(c0)
    if c0 <= 0:
        raise ValueError("c0 must be positive")
    if model == "F":
        if l < 1:
            raise ValueError("log order must be >= 1")
        return AsymptoticLaw(-2 - c0, 1 - l, "r_to_0")
    if model == "rho":
        return AsymptoticLaw(-2 - 2 * c0, 0, "Imw_to_0", epsilon_caveat=True)
    raise ValueError("model must be 'F' or 'rho'")


def _metric(c0, c1, m0, m1) -> AsymptoticLaw:
    return AsymptoticLaw(-(c1 - c0), -(m1 - m0), "r_to_0")


def _curvature(c0, c1, c2, m0, m1, m2) -> AsymptoticLaw:
    if 2 * c1 < c0 + c2:
        raise InternalInconsistencyError(
            f"Schwarz inequality violated: 2*{c1} < {c0} + {c2}")
    return AsymptoticLaw(2 * c1 - c0 - c2, 2 * m1 - m2 - m0, "r_to_0")


def _classify_law(law: AsymptoticLaw) -> Curvature:
    # 2 - R ~ r^E |log r|^L
    if law.power > 0 or (law.power == 0 and law.logpow < 0):
        return Curvature.TENDS_TO_TWO
    if law.logpow == 0:
        return Curvature.BOUNDED_BELOW
    return Curvature.UNBOUNDED_BELOW


NORMAL_METRIC_LAW = AsymptoticLaw(-2, 0, "r_to_0")


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class CoordinateData:
    """Everything attached to one tangential direction ``z_j``."""

    j: int
    c1: Fraction
    c2: Fraction
    m1: int
    m2: int
    metric_law: AsymptoticLaw
    curvature_law: AsymptoticLaw
    classification: str
    m1_faces: int | None = None
    m2_faces: int | None = None
    d1: Fraction | None = None
    d2: Fraction | None = None
    convexity: tuple[Fraction, Fraction] | None = None
    conjecture_relevant: bool = False


@dataclass(frozen=True)
class SingularityReport:
    n: int
    components: tuple[str, ...]
    base_point: tuple[str, ...]
    method: str
    c0: Fraction
    lct: Fraction
    m0: int
    kernel_law: AsymptoticLaw
    volume_law: AsymptoticLaw
    coordinates: tuple[CoordinateData, ...]
    nondegeneracy: str
    d0: Fraction | None = None
    m0_faces: int | None = None
    normal_metric_law: AsymptoticLaw = NORMAL_METRIC_LAW
    volume_bounds: dict = field(default_factory=dict, compare=True)
    warnings: tuple[str, ...] = ()
    interpretation: tuple[str, ...] = ()

    def coordinate(self, j: int) -> CoordinateData:
        for cd in self.coordinates:
            if cd.j == j:
                return cd
        raise KeyError(f"no data for coordinate {j}")

    # -- json ---------------------------------------------------------------
    def to_dict(self) -> dict:
        def opt(q):
            return None if q is None else frac_str(q)

        return {
            "schema": "cse-kit/report/1",
            "n": self.n,
            "components": list(self.components),
            "base_point": list(self.base_point),
            "method": self.method,
            "c0": frac_str(self.c0),
            "lct": frac_str(self.lct),
            "d0": opt(self.d0),
            "m0": self.m0,
            "m0_faces": self.m0_faces,
            "kernel_law": self.kernel_law.to_dict(),
            "volume_law": self.volume_law.to_dict(),
            "normal_metric_law": self.normal_metric_law.to_dict(),
            "volume_bounds": {k: (v.to_dict() if isinstance(v, AsymptoticLaw) else v)
                         for k, v in self.volume_bounds.items()},
            "coordinates": [{
                "j": cd.j, "c1": frac_str(cd.c1), "c2": frac_str(cd.c2),
                "m1": cd.m1, "m2": cd.m2, "m1_faces": cd.m1_faces, "m2_faces": cd.m2_faces,
                "d1": opt(cd.d1), "d2": opt(cd.d2),
                "metric_law": cd.metric_law.to_dict(),
                "curvature_law": cd.curvature_law.to_dict(),
                "classification": cd.classification,
                "convexity": None if cd.convexity is None else [frac_str(x) for x in cd.convexity],
                "conjecture_relevant": cd.conjecture_relevant,
            } for cd in self.coordinates],
            "nondegeneracy": self.nondegeneracy,
            "warnings": list(self.warnings),
            "interpretation": list(self.interpretation),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SingularityReport":
        def opt(q):
            return None if q is None else Fraction(q)

        coords = tuple(CoordinateData(
            j=c["j"], c1=Fraction(c["c1"]), c2=Fraction(c["c2"]), m1=c["m1"], m2=c["m2"],
            metric_law=AsymptoticLaw.from_dict(c["metric_law"]),
            curvature_law=AsymptoticLaw.from_dict(c["curvature_law"]),
            classification=c["classification"], m1_faces=c["m1_faces"], m2_faces=c["m2_faces"],
            d1=opt(c["d1"]), d2=opt(c["d2"]),
            convexity=None if c["convexity"] is None else tuple(Fraction(x) for x in c["convexity"]),
            conjecture_relevant=c["conjecture_relevant"]) for c in d["coordinates"])
        t4 = {k: (AsymptoticLaw.from_dict(v) if isinstance(v, dict) else v)
              for k, v in d.get("volume_bounds", {}).items()}
        return cls(
            n=d["n"], components=tuple(d["components"]), base_point=tuple(d["base_point"]),
            method=d["method"], c0=Fraction(d["c0"]), lct=Fraction(d["lct"]), m0=d["m0"],
            kernel_law=AsymptoticLaw.from_dict(d["kernel_law"]),
            volume_law=AsymptoticLaw.from_dict(d["volume_law"]),
            coordinates=coords, nondegeneracy=d["nondegeneracy"], d0=opt(d["d0"]),
            m0_faces=d["m0_faces"],
            normal_metric_law=AsymptoticLaw.from_dict(d["normal_metric_law"]),
            volume_bounds=t4, warnings=tuple(d["warnings"]), interpretation=tuple(d["interpretation"]))

    def render_text(self, include_warnings: bool = True) -> str:
        lines = [
            f"F = ({'; '.join(self.components)}) recentred at ({', '.join(self.base_point)}), n = {self.n}",
            f"method: {self.method}    nondegeneracy: {self.nondegeneracy}",
            f"c0 = {self.c0}    lct = {self.lct}    m0 = {self.m0}"
            + ("" if self.m0_faces is None else f" (face count: {self.m0_faces})")
            + ("" if self.d0 is None else f"    d0 = {self.d0}"),
            self.kernel_law.render("K"),
            self.volume_law.render("Vol{|F|<r}"),
            self.normal_metric_law.render("g_normal"),
        ]
        for cd in self.coordinates:
            lines.append(f"  z{cd.j}: c1 = {cd.c1}, c2 = {cd.c2}, m1 = {cd.m1}, m2 = {cd.m2}"
                         + ("" if cd.d1 is None else f", d1 = {cd.d1}, d2 = {cd.d2}"))
            lines.append("    " + cd.metric_law.render(f"g_{cd.j}{cd.j}"))
            lines.append("    " + cd.curvature_law.render("2 - R"))
            extra = ""
            if cd.convexity is not None:
                extra = f"  (1/d2 + 1/d0 = {cd.convexity[0]} vs 2/d1 = {cd.convexity[1]})"
            lines.append(f"    curvature: {cd.classification}{extra}")
        if include_warnings:
            lines.extend(f"warning: {w}" for w in self.warnings)
        return "\n".join(lines)


def metric_law(report: SingularityReport, j: int) -> AsymptoticLaw:
    """Tangential Bergman metric coefficient along ``z_j``."""
    cd = report.coordinate(j)
    return _metric(report.c0, cd.c1, report.m0, cd.m1)


def curvature_law(report: SingularityReport, j: int) -> AsymptoticLaw:
    """``2 - R`` along ``z_j``; raises if the Schwarz inequality fails."""
    cd = report.coordinate(j)
    return _curvature(report.c0, cd.c1, cd.c2, report.m0, cd.m1, cd.m2)


def _point_text(z0) -> tuple[str, ...]:
    out = []
    for x in z0:
        if isinstance(x, QQi):
            out.append(str(x))
        else:
            out.append(repr(x))
    return tuple(out)


def _build_coordinate(j, c0, m0, c1, c2, m1, m2, **extra) -> CoordinateData:
    met = _metric(c0, c1, m0, m1)
    curv = _curvature(c0, c1, c2, m0, m1, m2)
    law_cls = _classify_law(curv)
    return CoordinateData(j=j, c1=c1, c2=c2, m1=m1, m2=m2, metric_law=met, curvature_law=curv,
                          classification=extra.pop("classification", law_cls.value),
                          conjecture_relevant=law_cls is Curvature.UNBOUNDED_BELOW, **extra)


def _volume_bounds(c0, l) -> dict:
    return {
        "lower": AsymptoticLaw(c0, l - 1, "r_to_0"),
        "upper": AsymptoticLaw(c0, 0, "r_to_0", epsilon_caveat=True),
        "note": "bounds as printed (r^c0 |log r|^(l-1) <= Vol <= C_eps r^(c0-eps)); "
                "non-sharp as printed, the sharp law is volume_law",
    }


def _interpretation_notes(method):
    notes = ["l'_j and l''_j are identified with the weighted log orders m1_j and m2_j"]
    if method == "newton":
        notes.append("operative log orders are minimal-face codimensions; "
                     "m*_faces carry min(face count, n)")
    return tuple(notes)


def _smooth_report(f, n, comps, z0, warnings) -> SingularityReport:
    coords = []
    for j in range(1, n + 1):
        divisible = all(g[j - 1] >= 1 for g in f.support)
        c1, c2 = (Fraction(2), Fraction(3)) if divisible else (Fraction(1), Fraction(1))
        coords.append(_build_coordinate(j, Fraction(1), 1, c1, c2, 1, 1))
    return _finish(n, comps, z0, "smooth", Fraction(1), 1, coords, "nondegenerate (smooth point)",
                   warnings, d0=None, m0_faces=None)


def _finish(n, comps, z0, method, c0, m0, coords, nondeg, warnings, d0, m0_faces):
    return SingularityReport(
        n=n, components=tuple(comps), base_point=_point_text(z0), method=method,
        c0=c0, lct=2 * c0, m0=m0, kernel_law=kernel_law(c0, m0),
        volume_law=AsymptoticLaw(2 * c0, m0 - 1, "r_to_0"), coordinates=tuple(coords),
        nondegeneracy=nondeg, d0=d0, m0_faces=m0_faces, volume_bounds=_volume_bounds(c0, m0),
        warnings=tuple(warnings), interpretation=_interpretation_notes(method))


def _chart_report(n, comps, z0, charts: ChartData, nondeg, warnings) -> SingularityReport:
    c0, m0 = cse_from_charts(charts, 0)
    c1, m1 = cse_from_charts(charts, 1)
    c2, m2 = cse_from_charts(charts, 2)
    cd = _build_coordinate(1, c0, m0, c1, c2, m1, m2)
    warnings = list(warnings) + ["chart data describes the distinguished coordinate z1 only"]
    return _finish(n, comps, z0, "charts", c0, m0, [cd], nondeg, warnings, None, None)


def assemble_report(F: Sequence[SparsePolynomial] | SparsePolynomial, z0=None, *,
                    charts: ChartData | None = None, seed: int = 0) -> SingularityReport:
    """Full set of exponents and laws for ``Im w > |F|^2`` over the base point ``z0``.

    The map is recentred at ``z0`` first.  A single component is handled by
    the Newton polyhedron when it is nondegenerate with ``d0 > 1`` and by
    the smooth-point rule when it has a linear term; anything else needs
    resolution chart data and raises :class:`NeedsChartsError` without it.
    """
    if isinstance(F, SparsePolynomial):
        F = [F]
    F = list(F)
    if not F:
        raise ValueError("empty map")
    n = F[0].n
    if z0 is None:
        z0 = tuple(QQi(0) for _ in range(n))
    G = [g for g in recenter(F, z0) if not g.is_zero()]
    if not G:
        raise ValueError("F is constant near the base point")
    comps = [format_poly(g) for g in G]
    warnings: list[str] = []

    if len(G) > 1:
        if charts is None:
            raise NeedsChartsError("maps with several components need resolution chart data")
        return _chart_report(n, comps, z0, charts, "not checked (map)", warnings)

    f = G[0]
    if f.degree() == 1 or any(sum(g) == 1 for g in f.support):
        N = newton_polyhedron(f)
        d0 = diagonal_intersection(N, 0).d
        if d0 <= 1:
            warnings.append(f"d0 = {d0} <= 1 (smooth point); smooth-point exponents used")
        return _smooth_report(f, n, comps, z0, warnings)

    verdict = is_nondegenerate(f, seed=seed)
    if verdict.status is not Status.NONDEGENERATE:
        if charts is None:
            raise NeedsChartsError(f"f is {verdict.describe()}; Newton formulas do not apply")
        return _chart_report(n, comps, z0, charts, verdict.describe(), warnings)

    N = newton_polyhedron(f)
    D0 = diagonal_intersection(N, 0, 1)
    single = len(N.vertices) == 1
    if D0.d < 1 or (D0.d == 1 and not single and D0.minimal_face.dim > 0):
        if charts is None:
            raise NeedsChartsError(f"d0 = {D0.d} <= 1 at a singular point; Newton formulas do not apply")
        warnings.append(f"d0 = {D0.d} <= 1; chart data used")
        return _chart_report(n, comps, z0, charts, verdict.describe(), warnings)
    if D0.d == 1:
        warnings.append("d0 = 1: normal-crossing case (Q0 is a vertex or f is a monomial), "
                        "c0 = 1 with log order from the codimension")

    c0 = 1 / D0.d
    m0 = D0.minimal_face_codim
    m0_faces = min(D0.compact_face_count, n)
    if m0 != m0_faces:
        warnings.append(f"log order conventions differ at Q0: codimension {m0}, face count {m0_faces}")
    coords = []
    for j in range(1, n + 1):
        D1 = diagonal_intersection(N, 1, j)
        D2 = diagonal_intersection(N, 2, j)
        lhs, rhs = 1 / D2.d + 1 / D0.d, 2 / D1.d
        if lhs > rhs:
            raise InternalInconsistencyError(f"convexity violated on axis {j}")
        cls = Curvature.TENDS_TO_TWO if lhs < rhs else Curvature.BOUNDED_BELOW
        c1, m1, w1 = _weighted_from_newton(D1, single, n)
        c2, m2, w2 = _weighted_from_newton(D2, single, n)
        warnings.extend(f"z{j}: {w}" for w in (w1, w2) if w)
        cd = _build_coordinate(
            j, c0, m0, c1, c2, m1, m2,
            m1_faces=min(D1.compact_face_count, n), m2_faces=min(D2.compact_face_count, n),
            d1=D1.d, d2=D2.d, convexity=(lhs, rhs), classification=cls.value)
        if _classify_law(cd.curvature_law).value != cls.value:
            warnings.append(f"z{j}: curvature law {cd.curvature_law.render('2 - R')} "
                            f"vs convexity verdict {cls.value}")
        if cd.conjecture_relevant:
            warnings.append(f"z{j}: curvature law predicts R -> -infinity (conjecture-relevant)")
        coords.append(cd)
    return _finish(n, comps, z0, "newton", c0, m0, coords, verdict.describe(), warnings,
                   d0=D0.d, m0_faces=m0_faces)


def _weighted_from_newton(D, single_vertex: bool, n: int):
    """Weighted exponent and log order at ``Q_tau``, with any caveat.

    When Gamma(f) has two or more vertices, a compact edge puts zeros of
    ``f`` in the torus, so ``{f = 0}`` reaches points where the weight does
    not vanish and contributes a simple pole at 1.  The exponent is then
    ``min(1, 1/d_tau)``; at a tie the strict transform adds one to the
    multiplicity when it meets the stratum of the minimal face.
    """
    raw = 1 / D.d
    m = D.minimal_face_codim
    if single_vertex or raw < 1:
        return raw, m, None
    if raw > 1:
        return Fraction(1), 1, (f"tau={D.tau}: 1/d = {raw} exceeds 1; the zero set of f away from "
                                f"the coordinate hyperplanes caps the weighted exponent at 1")
    if D.minimal_face.dim == 0:
        return raw, m, None
    if D.minimal_face.compact:
        return raw, min(m + 1, n), (f"tau={D.tau}: 1/d = 1 ties with the strict transform; "
                                    f"log order raised to {min(m + 1, n)}")
    return raw, m, (f"tau={D.tau}: 1/d = 1 on a non-compact face; "
                    f"log order {m} does not account for the strict transform")


def weighted_cse(f: SparsePolynomial, j: int, tau: int) -> tuple[Fraction, int]:
    """``c0(|f|; |z_j|^tau)`` and its log order, including the cap at 1.

    Differs from :func:`weighted_cse_newton` only when ``1/d_tau >= 1`` and
    Gamma(f) has more than one vertex.
    """
    _check_newton_input(f)
    N = newton_polyhedron(f)
    c, m, _ = _weighted_from_newton(diagonal_intersection(N, tau, j), len(N.vertices) == 1, f.n)
    return c, m


def real_series_data(rho: RealSeries) -> dict:
    """Newton distance and lowest half-degree of a real series ``rho(x, y)``.

    For ``Im w > rho`` with ``rho`` of this form the kernel at ``(0, w)``
    follows ``(Im w)^(-2 - 1/delta)``; the Newton distance ``d0`` of the
    real polyhedron governs the slice volumes instead, and the two differ in
    general.
    """
    N = build_polyhedron(rho.full_exponents(), 2)
    d0 = diagonal_intersection(N, 0).d
    delta = real_delta(rho)
    return {
        "d0": d0,
        "delta": delta,
        "differ": d0 != delta,
        "kernel_law": AsymptoticLaw(-2 - 1 / delta, 0, "Imw_to_0"),
        "literal_law": AsymptoticLaw(-2 - 2 / d0, 0, "Imw_to_0", epsilon_caveat=True),
        "volume_law": AsymptoticLaw(1 / d0, 0, "Imw_to_0"),
        "vertices": N.vertices,
    }


def perturb_report(report: SingularityReport, dc0) -> SingularityReport:
    """Copy of ``report`` with ``c0`` shifted; used as a negative control."""
    c0 = report.c0 + Fraction(dc0)
    return replace(report, c0=c0, lct=2 * c0,
                   volume_law=AsymptoticLaw(2 * c0, report.volume_law.logpow, "r_to_0"))
