"""Newton polyhedra ``conv(U (gamma + R^n_+))`` in exact rational arithmetic.

Facets are stored as normals ``w >= 0`` of inequalities ``<w, x> >= 1``;
the coordinate inequalities ``x_k >= 0`` are implicit.  Faces are
identified by the set of (facet or coordinate) inequalities that are tight
on them, which also handles unbounded faces whose vertex sets coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from .polyparse import SparsePolynomial

Point = tuple[Fraction, ...]

DEFAULT_MAX_DIM = 6


class UnsupportedDimensionError(ValueError):
    pass


def _frac_tuple(x) -> Point:
    return tuple(Fraction(v) for v in x)


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank of a rational matrix."""
    m = [[Fraction(v) for v in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                factor = m[i][c] / m[r][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def dominance_minimal(points: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """Points not componentwise dominated by another point of the set."""
    pts = sorted(set(tuple(p) for p in points))
    out = []
    for p in pts:
        if not any(q != p and all(a <= b for a, b in zip(q, p)) for q in pts):
            out.append(p)
    return out


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _facets_2d(points: list[tuple[int, ...]]) -> list[Point]:
    pts = sorted(points)  # x ascending, so y strictly descending
    chain: list[tuple[int, ...]] = []
    for p in pts:
        while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0:
            chain.pop()
        chain.append(p)
    facets = []
    first, last = chain[0], chain[-1]
    if first[0] > 0:
        facets.append((Fraction(1, first[0]), Fraction(0)))
    for (x1, y1), (x2, y2) in zip(chain, chain[1:]):
        a, b = y1 - y2, x2 - x1
        off = a * x1 + b * y1
        facets.append((Fraction(a, off), Fraction(b, off)))
    if last[1] > 0:
        facets.append((Fraction(0), Fraction(1, last[1])))
    return facets


def _facets_dd(points: list[tuple[int, ...]], n: int) -> list[Point]:
    """Facets via the double-description method on the cone of valid inequalities.

    A pair ``(w, b)`` with ``<w, gamma> >= b`` for every support point and
    ``w >= 0, b >= 0`` is a cone in ``R^(n+1)``; its extreme rays with
    ``b > 0`` are exactly the facets of the Newton polyhedron.
    """
    d = n + 1
    rows = [tuple(1 if i == k else 0 for i in range(d)) for k in range(d)]
    rows += [tuple(p) + (-1,) for p in points]
    rays: list[tuple[tuple[int, ...], int]] = []
    full = (1 << d) - 1
    for k in range(d):
        rays.append((rows[k], full & ~(1 << k)))
    for idx in range(d, len(rows)):
        a = rows[idx]
        vals = [sum(x * y for x, y in zip(a, r)) for r, _ in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        new = [(rays[i][0], rays[i][1] | ((1 << idx) if vals[i] == 0 else 0))
               for i in range(len(rays)) if vals[i] >= 0]
        bit = 1 << idx
        for i in pos:
            ri, zi = rays[i]
            for k in neg:
                rk, zk = rays[k]
                common = zi & zk
                if bin(common).count("1") < d - 2:
                    continue
                if any(m != i and m != k and (zm & common) == common
                       for m, (_, zm) in enumerate(rays)):
                    continue
                vec = [vals[i] * y - vals[k] * x for x, y in zip(ri, rk)]
                g = 0
                for v in vec:
                    g = gcd(g, v)
                vec = tuple(v // g for v in vec)
                new.append((vec, common | bit))
        rays = new
    facets = set()
    for r, _ in rays:
        if r[-1] > 0:
            facets.add(tuple(Fraction(v, r[-1]) for v in r[:-1]))
    return sorted(facets)


@dataclass(frozen=True)
class Face:
    """A face of a Newton polyhedron.

    ``normal`` supports the face: it is minimised over the polyhedron exactly
    on the face.  For compact faces it is strictly positive and normalised so
    that the face lies on ``<normal, x> = 1``.
    """

    normal: Point
    vertices: tuple[tuple[int, ...], ...]
    dim: int
    compact: bool
    tight: frozenset[int] = field(repr=False, compare=False)


@dataclass(frozen=True)
class NewtonPolyhedron:
    n: int
    vertices: tuple[tuple[int, ...], ...]
    facets: tuple[Point, ...]

    # inequalities as (normal, offset): facets first, then the coordinates
    @cached_property
    def inequalities(self) -> tuple[tuple[Point, Fraction], ...]:
        coords = tuple((tuple(Fraction(int(i == k)) for i in range(self.n)), Fraction(0))
                       for k in range(self.n))
        return tuple((w, Fraction(1)) for w in self.facets) + coords

    @property
    def compact_facets(self) -> tuple[Point, ...]:
        return tuple(w for w in self.facets if all(c > 0 for c in w))

    def tight_set(self, x: Sequence) -> frozenset[int]:
        x = _frac_tuple(x)
        return frozenset(i for i, (w, b) in enumerate(self.inequalities)
                         if sum(a * c for a, c in zip(w, x)) == b)

    def contains(self, x: Sequence) -> bool:
        return membership(self, x)

    @cached_property
    def faces(self) -> tuple[Face, ...]:
        return tuple(_enumerate_faces(self))

    @cached_property
    def compact_faces(self) -> tuple[Face, ...]:
        return tuple(f for f in self.faces if f.compact)

    def face_of(self, tight: frozenset[int]) -> Face:
        """The face cut out by the inequalities in ``tight`` (after closure)."""
        closed = _closure(self, tight)
        if closed is None:
            raise ValueError("empty face")
        return _make_face(self, *closed)


def build_polyhedron(supports: Iterable[Sequence[int]], n: int, *,
                     max_dim: int = DEFAULT_MAX_DIM) -> NewtonPolyhedron:
    """Newton polyhedron of a finite support set in ``N^n`` (zero excluded)."""
    if n > max_dim:
        raise UnsupportedDimensionError(f"dimension {n} exceeds the configured cap {max_dim}")
    if n < 1:
        raise ValueError("dimension must be at least 1")
    pts = [tuple(int(v) for v in p) for p in supports]
    if not pts:
        raise ValueError("empty support set")
    for p in pts:
        if len(p) != n or min(p) < 0:
            raise ValueError(f"bad support point {p}")
        if not any(p):
            raise ValueError("the zero exponent is not allowed (f(0) must vanish)")
    minimal = dominance_minimal(pts)
    facets = _facets_2d(minimal) if n == 2 else _facets_dd(minimal, n)
    probe = NewtonPolyhedron(n, (), tuple(facets))
    ineqs = probe.inequalities
    verts = []
    for p in minimal:
        normals = [ineqs[i][0] for i in probe.tight_set(p)]
        if rank(normals) == n:
            verts.append(p)
    return NewtonPolyhedron(n, tuple(sorted(verts)), tuple(facets))


def newton_polyhedron(f: SparsePolynomial, **kw) -> NewtonPolyhedron:
    if f.is_zero():
        raise ValueError("zero polynomial has no Newton polyhedron")
    return build_polyhedron(f.support, f.n, **kw)


def membership(N: NewtonPolyhedron, x: Sequence) -> bool:
    """True iff ``x`` satisfies every facet and coordinate inequality."""
    x = _frac_tuple(x)
    return all(sum(a * c for a, c in zip(w, x)) >= b for w, b in N.inequalities)


# ---------------------------------------------------------------------------
# faces

def _closure(N: NewtonPolyhedron, T: Iterable[int]):
    T = frozenset(T)
    ineqs = N.inequalities
    V = [v for v in N.vertices
         if all(sum(a * c for a, c in zip(ineqs[h][0], v)) == ineqs[h][1] for h in T)]
    if not V:
        return None
    K = [k for k in range(N.n) if all(ineqs[h][0][k] == 0 for h in T)]
    closed = frozenset(
        h for h, (w, b) in enumerate(ineqs)
        if all(w[k] == 0 for k in K)
        and all(sum(a * c for a, c in zip(w, v)) == b for v in V))
    return closed, V, K


def _make_face(N: NewtonPolyhedron, T, V, K) -> Face:
    ineqs = N.inequalities
    v0 = V[0]
    rows = [[a - b for a, b in zip(v, v0)] for v in V[1:]]
    rows += [[int(i == k) for i in range(N.n)] for k in K]
    dim = rank(rows)
    normal = [Fraction(0)] * N.n
    offset = Fraction(0)
    for h in T:
        w, b = ineqs[h]
        normal = [x + y for x, y in zip(normal, w)]
        offset += b
    compact = not K
    if compact:
        normal = [x / offset for x in normal]
    return Face(tuple(normal), tuple(sorted(V)), dim, compact, T)


def _enumerate_faces(N: NewtonPolyhedron) -> list[Face]:
    start = _closure(N, ())
    seen = {start[0]: start}
    frontier = [start[0]]
    m = len(N.inequalities)
    while frontier:
        nxt = []
        for T in frontier:
            for h in range(m):
                if h in T:
                    continue
                c = _closure(N, T | {h})
                if c is not None and c[0] not in seen:
                    seen[c[0]] = c
                    nxt.append(c[0])
        frontier = nxt
    faces = [_make_face(N, *c) for c in seen.values()]
    faces.sort(key=lambda f: (f.dim, f.vertices, f.normal))
    return faces


def enumerate_compact_faces(N: NewtonPolyhedron) -> list[Face]:
    """All bounded faces (vertices included), ordered by dimension."""
    return list(N.compact_faces)


# ---------------------------------------------------------------------------
# weighted diagonal

def diagonal_direction(n: int, tau: int, j: int) -> Point:
    """``(1, ..., 1+tau, ..., 1)`` with the weight on axis ``j`` (1-based)."""
    if not 1 <= j <= n:
        raise ValueError(f"axis {j} out of range 1..{n}")
    return tuple(Fraction(1 + tau) if k == j - 1 else Fraction(1) for k in range(n))


@dataclass(frozen=True)
class DiagonalData:
    tau: int
    j: int
    d: Fraction
    Q: Point
    compact_face_count: int
    minimal_face_codim: int
    minimal_face: Face = field(repr=False)


def diagonal_intersection(N: NewtonPolyhedron, tau: int, j: int = 1) -> DiagonalData:
    """Where the ray ``t * (1,..,1+tau,..,1)`` meets the boundary of ``N``."""
    v = diagonal_direction(N.n, tau, j)
    d = max(1 / sum(a * b for a, b in zip(w, v)) for w in N.facets)
    Q = tuple(d * c for c in v)
    tight = N.tight_set(Q)
    minimal = N.face_of(tight)
    count = sum(1 for f in N.compact_faces if f.tight <= tight)
    return DiagonalData(tau, j, d, Q, count, N.n - minimal.dim, minimal)


def diagonal_by_bisection(N: NewtonPolyhedron, tau: int, j: int = 1, *,
                          iterations: int = 80, max_den: int = 10**6) -> Fraction:
    """Independent route to ``d_tau``: bisect on membership, then snap to a rational.

    The snapped candidate ``c`` is accepted only if ``c * v`` is a member,
    some inequality is tight there, and a point slightly inside the ray is
    not a member.
    """
    v = diagonal_direction(N.n, tau, j)
    lo = Fraction(0)
    hi = Fraction(max(max(p) for p in N.vertices))
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if membership(N, [mid * c for c in v]):
            hi = mid
        else:
            lo = mid
    den = 1
    while den <= max_den:
        c = hi.limit_denominator(den)
        pt = [c * x for x in v]
        if (membership(N, pt) and N.tight_set(pt) - set(range(len(N.facets), len(N.inequalities)))
                and not membership(N, [(c - Fraction(1, 10**12)) * x for x in v])):
            return c
        den *= 2
    raise ArithmeticError("bisection did not settle on a rational boundary point")


# ---------------------------------------------------------------------------
# serialisation

def frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def polyhedron_to_dict(N: NewtonPolyhedron) -> dict:
    return {
        "n": N.n,
        "vertices": [list(v) for v in N.vertices],
        "facets": [{"normal": [frac_str(c) for c in w], "offset": "1/1",
                    "compact": all(c > 0 for c in w)} for w in N.facets],
        "coordinate_inequalities": [f"x{k + 1} >= 0" for k in range(N.n)],
        "compact_faces": [{"dim": f.dim, "normal": [frac_str(c) for c in f.normal],
                           "vertices": [list(v) for v in f.vertices]}
                          for f in N.compact_faces],
    }
