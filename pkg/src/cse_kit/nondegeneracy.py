"""Kouchnirenko nondegeneracy of a polynomial on the compact faces of Gamma(f).

``f`` is nondegenerate on a compact face when the face polynomial has no
critical point with all coordinates nonzero.  Decided exactly for vertices,
for faces whose support points are linearly independent, and for edges (any
dimension).  Faces of dimension >= 2 fall back to a seeded multistart search
on the torus, which can prove degeneracy but never nondegeneracy.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .gaussq import QQi
from .newton import Face, newton_polyhedron, rank
from .polyparse import SparsePolynomial

RESIDUAL_TOL = 1e-10


class Status(enum.Enum):
    NONDEGENERATE = "nondegenerate"
    DEGENERATE = "degenerate"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    status: Status
    face: Face | None = None
    unknown_faces: tuple[Face, ...] = field(default=(), repr=False)

    @property
    def ok(self) -> bool:
        return self.status is Status.NONDEGENERATE

    def describe(self) -> str:
        if self.face is None:
            return self.status.value
        return f"{self.status.value} on face {[list(v) for v in self.face.vertices]}"


def face_polynomial(f: SparsePolynomial, face: Face) -> dict:
    return {g: c for g, c in f.terms.items()
            if sum(a * b for a, b in zip(face.normal, g)) == 1}


# -- univariate helpers over Q(i) (coefficient lists, low degree first) -------

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _polymod(a, b):
    a = _trim(a)
    b = _trim(b)
    lead = b[-1]
    while len(a) >= len(b) and a:
        q = a[-1] / lead
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[i + shift] = a[i + shift] - q * c
        a = _trim(a)
    return a


def poly_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _polymod(a, b)
    if not a:
        return a
    lead = a[-1]
    return [c / lead for c in a]


def _derivative(p):
    return [k * c for k, c in enumerate(p)][1:]


def has_multiple_root(coeffs, exact: bool) -> bool:
    """Whether the univariate polynomial (low degree first) has a repeated root."""
    p = _trim(coeffs)
    if len(p) <= 2:
        return False
    if exact:
        g = poly_gcd(p, _derivative(p))
        return len(g) > 1
    c = np.array([complex(x) for x in p])
    roots = np.roots(c[::-1])
    dp = np.polynomial.polynomial.polyder(c)
    for r in roots:
        scale = sum(abs(x) * abs(r) ** max(k - 1, 0) * k for k, x in enumerate(c)) or 1.0
        if abs(np.polynomial.polynomial.polyval(r, dp)) / scale < 1e-8:
            return True
    return False


def _edge_degenerate(fd: dict, face: Face, exact: bool) -> bool:
    A, B = face.vertices[0], face.vertices[-1]
    diff = [b - a for a, b in zip(A, B)]
    g = 0
    for x in diff:
        g = gcd(g, x)
    step = [x // g for x in diff]
    coeffs = []
    for k in range(abs(g) + 1):
        pt = tuple(a + k * s for a, s in zip(A, step))
        coeffs.append(fd.get(pt, QQi(0) if exact else 0j))
    return has_multiple_root(coeffs, exact)


def _torus_search(fd: dict, n: int, rng: np.random.Generator, starts: int = 40,
                  iterations: int = 60) -> float:
    """Smallest scale-free residual of ``z_k d/dz_k f_face`` found on the torus."""
    G = np.array(list(fd.keys()), dtype=float)
    c = np.array([complex(v) for v in fd.values()])
    best = np.inf
    for _ in range(starts):
        zeta = rng.uniform(-1, 1, n) + 1j * rng.uniform(0, 2 * np.pi, n)
        for _ in range(iterations):
            mono = c * np.exp(G @ zeta)
            g = G.T @ mono
            scale = np.sum(np.abs(mono)) * np.max(np.abs(G))
            res = np.linalg.norm(g) / scale
            best = min(best, res)
            if res < RESIDUAL_TOL or not np.isfinite(res):
                break
            J = (G.T * mono) @ G
            step = np.linalg.lstsq(J, -g, rcond=None)[0]
            zeta = zeta + step
            if np.max(np.abs(zeta.real)) > 50:
                break
    return best


def is_nondegenerate(f: SparsePolynomial, *, seed: int = 0) -> Verdict:
    if f.is_zero() or not f.vanishes_at_origin():
        raise ValueError("need a nonzero polynomial with f(0) = 0")
    N = newton_polyhedron(f)
    rng = np.random.default_rng(seed)
    unknown = []
    for face in N.compact_faces:
        if face.dim == 0:
            continue
        fd = face_polynomial(f, face)
        pts = list(fd)
        if rank(pts) == len(pts):
            continue
        if face.dim == 1:
            if _edge_degenerate(fd, face, f.exact):
                return Verdict(Status.DEGENERATE, face)
            continue
        if _torus_search(fd, f.n, rng) < RESIDUAL_TOL:
            return Verdict(Status.DEGENERATE, face)
        unknown.append(face)
    if unknown:
        return Verdict(Status.UNKNOWN, unknown[0], tuple(unknown))
    return Verdict(Status.NONDEGENERATE)
