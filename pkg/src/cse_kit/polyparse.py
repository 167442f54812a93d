"""Sparse multivariate polynomials over C: parsing, printing, evaluation.

The grammar is small on purpose::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/' | <juxtaposition>) unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := NUMBER | 'i' | VARIABLE | '(' expr ')'

Variables are ``z1 ... zn``.  Division is only allowed by a nonzero
constant.  Numbers are read exactly (``0.25`` is ``1/4``), so every parsed
polynomial carries Gaussian-rational coefficients.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .gaussq import QQi, format_qqi

Exponent = tuple[int, ...]


class ParseError(ValueError):
    """Malformed polynomial text; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        detail = f"{message} at position {pos}"
        if text:
            detail += f"\n  {text}\n  {' ' * pos}^"
        super().__init__(detail)


class ZeroPolynomialError(ValueError):
    """A nonzero polynomial was required but the input cancels to zero."""


def _is_exact_scalar(c) -> bool:
    return isinstance(c, (QQi, int, Fraction))


def _to_coeff(c, exact: bool):
    if exact:
        return QQi.coerce(c)
    return complex(c)


class SparsePolynomial:
    """Finitely many monomials ``c * z^gamma`` in ``n`` variables.

    ``terms`` maps exponent tuples to coefficients; zero coefficients are
    never stored, so equal polynomials have identical term maps.  When
    ``exact`` is true all coefficients are :class:`QQi`, otherwise
    ``complex``.
    """

    __slots__ = ("n", "_terms", "exact")

    def __init__(self, n: int, terms: Mapping[Exponent, object] | None = None, exact: bool | None = None):
        if n < 0:
            raise ValueError("dimension must be non-negative")
        terms = dict(terms or {})
        if exact is None:
            exact = all(_is_exact_scalar(c) for c in terms.values())
        clean = {}
        for gamma, c in terms.items():
            gamma = tuple(int(g) for g in gamma)
            if len(gamma) != n or any(g < 0 for g in gamma):
                raise ValueError(f"bad exponent {gamma} for dimension {n}")
            c = _to_coeff(c, exact)
            if c != 0:
                clean[gamma] = c
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "exact", bool(exact))

    def __setattr__(self, name, value):
        raise AttributeError("SparsePolynomial is immutable")

    # construction helpers ----------------------------------------------
    @classmethod
    def constant(cls, n: int, c) -> "SparsePolynomial":
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, k: int) -> "SparsePolynomial":
        """The coordinate ``z_k`` (1-based)."""
        gamma = [0] * n
        gamma[k - 1] = 1
        return cls(n, {tuple(gamma): 1})

    # accessors -----------------------------------------------------------
    @property
    def terms(self) -> dict[Exponent, object]:
        return dict(self._terms)

    @property
    def support(self) -> frozenset[Exponent]:
        return frozenset(self._terms)

    def coefficient(self, gamma: Exponent):
        return self._terms.get(tuple(gamma), QQi(0) if self.exact else 0j)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(g) for g in self._terms), default=-1)

    def vanishes_at_origin(self) -> bool:
        return (0,) * self.n not in self._terms

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    def __repr__(self):
        return f"SparsePolynomial({self.n}, {self.to_text()!r})"

    def __str__(self):
        return self.to_text()

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> "SparsePolynomial":
        if isinstance(other, SparsePolynomial):
            if other.n != self.n:
                raise ValueError("dimension mismatch")
            return other
        return SparsePolynomial.constant(self.n, other)

    def __add__(self, other):
        other = self._coerce(other)
        exact = self.exact and other.exact
        out = {g: _to_coeff(c, exact) for g, c in self._terms.items()}
        for g, c in other._terms.items():
            out[g] = out.get(g, 0) + _to_coeff(c, exact)
        return SparsePolynomial(self.n, out, exact)

    __radd__ = __add__

    def __neg__(self):
        return SparsePolynomial(self.n, {g: -c for g, c in self._terms.items()}, self.exact)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        exact = self.exact and other.exact
        out: dict = {}
        for g1, c1 in self._terms.items():
            c1 = _to_coeff(c1, exact)
            for g2, c2 in other._terms.items():
                g = tuple(a + b for a, b in zip(g1, g2))
                out[g] = out.get(g, 0) + c1 * _to_coeff(c2, exact)
        return SparsePolynomial(self.n, out, exact)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        out = SparsePolynomial.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "SparsePolynomial":
        return self * SparsePolynomial.constant(self.n, c)

    def to_inexact(self) -> "SparsePolynomial":
        return SparsePolynomial(self.n, {g: complex(c) for g, c in self._terms.items()}, exact=False)

    # evaluation ------------------------------------------------------------
    def __call__(self, z):
        return evaluate(self, z)

    def evaluator(self):
        """Vectorised evaluator: ``(N, n)`` complex array -> ``(N,)`` values."""
        items = [(np.array(g), complex(c)) for g, c in self._terms.items()]
        maxdeg = [max((g[k] for g in self._terms), default=0) for k in range(self.n)]

        def f(z):
            z = np.asarray(z, dtype=complex)
            z = z.reshape(-1, self.n)
            powers = []
            for k in range(self.n):
                tab = np.empty((maxdeg[k] + 1, z.shape[0]), dtype=complex)
                tab[0] = 1.0
                for d in range(1, maxdeg[k] + 1):
                    tab[d] = tab[d - 1] * z[:, k]
                powers.append(tab)
            out = np.zeros(z.shape[0], dtype=complex)
            for g, c in items:
                term = np.full(z.shape[0], c, dtype=complex)
                for k, e in enumerate(g):
                    if e:
                        term *= powers[k][e]
                out += term
            return out

        return f

    # printing ----------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Exponent, object]]:
        """Terms in descending graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    def to_text(self) -> str:
        return format_poly(self)


def _monomial_text(gamma: Exponent, names: Sequence[str]) -> str:
    parts = []
    for k, e in enumerate(gamma):
        if e == 1:
            parts.append(names[k])
        elif e > 1:
            parts.append(f"{names[k]}^{e}")
    return "*".join(parts)


def _float_text(c: complex) -> tuple[str, bool]:
    """Text for a float coefficient and whether it is negative real."""
    if c.imag == 0:
        return repr(abs(c.real)), c.real < 0
    if c.real == 0:
        return f"{repr(abs(c.imag))}*i", c.imag < 0
    sign = "+" if c.imag >= 0 else "-"
    return f"({repr(c.real)}{sign}{repr(abs(c.imag))}*i)", False


def format_poly(f: SparsePolynomial, names: Sequence[str] | None = None) -> str:
    """Canonical text: descending graded-lex order, parseable by :func:`parse_poly`."""
    if names is None:
        names = [f"z{k + 1}" for k in range(f.n)]
    if f.is_zero():
        return "0"
    chunks = []
    for gamma, c in f.sorted_terms():
        mono = _monomial_text(gamma, names)
        if f.exact:
            # a leading minus is only pulled out of purely real/imaginary values
            neg = (c.im == 0 and c.re < 0) or (c.re == 0 and c.im < 0)
            ctext = format_qqi(-c if neg else c)
        else:
            ctext, neg = _float_text(c)
        if mono and ctext == "1":
            body = mono
        elif mono:
            body = f"{ctext}*{mono}"
        else:
            body = ctext
        if not chunks:
            chunks.append(f"-{body}" if neg else body)
        else:
            chunks.append(f" - {body}" if neg else f" + {body}")
    return "".join(chunks)


# ---------------------------------------------------------------------------
# parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>z\d+|[A-Za-z])
  | (?P<pow>\*\*|\^)
  | (?P<op>[-+*/()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    text = text.replace("−", "-").replace("·", "*")
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out, text


class _Parser:
    def __init__(self, text: str, n: int, variables: Mapping[str, int] | None):
        self.tokens, self.text = _tokenize(text)
        self.i = 0
        self.n = n
        self.variables = variables

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg, pos=None):
        raise ParseError(msg, self.peek()[2] if pos is None else pos, self.text)

    def parse(self) -> SparsePolynomial:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        val = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return val

    def expr(self):
        val = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def _starts_atom(self, tok):
        kind, txt, _ = tok
        return kind in ("num", "name") or (kind == "op" and txt == "(")

    def term(self):
        val = self.unary()
        while True:
            kind, txt, pos = self.peek()
            if kind == "op" and txt == "*":
                self.take()
                val = val * self.unary()
            elif kind == "op" and txt == "/":
                self.take()
                rhs = self.unary()
                if rhs.degree() > 0:
                    self.fail("division by a non-constant expression", pos)
                c = rhs.coefficient((0,) * self.n)
                if c == 0:
                    self.fail("division by zero", pos)
                val = val.scale(1 / c if rhs.exact else 1 / complex(c))
            elif self._starts_atom(self.peek()):
                val = val * self.power()
            else:
                return val

    def unary(self):
        kind, txt, _ = self.peek()
        if kind == "op" and txt in ("+", "-"):
            self.take()
            v = self.unary()
            return -v if txt == "-" else v
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "pow":
            self.take()
            kind, txt, pos = self.peek()
            if kind != "num" or not txt.isdigit():
                self.fail("exponent must be a non-negative integer literal")
            self.take()
            base = base ** int(txt)
            if self.peek()[0] == "pow":
                self.fail("chained exponents are ambiguous; use parentheses")
        return base

    def atom(self):
        kind, txt, pos = self.take()
        if kind == "num":
            return SparsePolynomial.constant(self.n, Fraction(txt))
        if kind == "name":
            if txt == "i":
                return SparsePolynomial.constant(self.n, QQi(0, 1))
            k = self._variable_index(txt, pos)
            return SparsePolynomial.variable(self.n, k)
        if kind == "op" and txt == "(":
            val = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return val
        if kind == "end":
            raise ParseError("unexpected end of input", pos, self.text)
        raise ParseError(f"unexpected token {txt!r}", pos, self.text)

    def _variable_index(self, name, pos):
        if self.variables is not None:
            if name not in self.variables:
                raise ParseError(f"unknown variable {name!r}", pos, self.text)
            return self.variables[name]
        m = re.fullmatch(r"z(\d+)", name)
        if m is None:
            raise ParseError(f"unknown name {name!r} (variables are z1..z{self.n})", pos, self.text)
        k = int(m.group(1))
        if k < 1 or k > self.n:
            raise ParseError(f"variable {name} out of range for n={self.n}", pos, self.text)
        return k


def parse_poly(text: str, n: int, *, allow_zero: bool = False,
               variables: Mapping[str, int] | None = None) -> SparsePolynomial:
    """Parse ``text`` into a canonical :class:`SparsePolynomial` in ``n`` variables.

    Raises :class:`ParseError` on malformed input or an out-of-range
    variable, and :class:`ZeroPolynomialError` if the result is identically
    zero (unless ``allow_zero``).
    """
    poly = _Parser(text, n, variables).parse()
    if poly.is_zero() and not allow_zero:
        raise ZeroPolynomialError(f"{text!r} is identically zero")
    return poly


def parse_map(text: str, n: int) -> list[SparsePolynomial]:
    """Parse ``f1; f2; ...`` into the component list of a holomorphic map."""
    parts = [p for p in text.split(";") if p.strip()]
    if not parts:
        raise ParseError("empty map", 0, text)
    return [parse_poly(p, n, allow_zero=True) for p in parts]


def parse_point(text: str, n: int | None = None) -> tuple[QQi, ...]:
    """Parse a comma separated list of constant expressions, e.g. ``"1, 1/2+i"``."""
    coords = []
    for chunk in text.split(","):
        p = _Parser(chunk, 0, {}).parse()
        coords.append(p.coefficient(()))
    if n is not None and len(coords) != n:
        raise ParseError(f"point has {len(coords)} coordinates, expected {n}", 0, text)
    return tuple(QQi.coerce(c) if isinstance(c, QQi) else c for c in coords)


# ---------------------------------------------------------------------------
# evaluation and recentering

def evaluate(f: SparsePolynomial, z: Sequence) -> object:
    """Term-sum evaluation; exact when ``f`` and every coordinate are exact."""
    if len(z) != f.n:
        raise ValueError(f"point has dimension {len(z)}, polynomial has {f.n}")
    exact = f.exact and all(_is_exact_scalar(x) for x in z)
    if exact:
        zz = [QQi.coerce(x) for x in z]
        total = QQi(0)
    else:
        zz = [complex(x) for x in z]
        total = 0j
    for gamma, c in f._terms.items():
        term = c if exact else complex(c)
        for x, e in zip(zz, gamma):
            if e:
                term = term * x ** e
        total = total + term
    return total


def recenter(F: Iterable[SparsePolynomial], z0: Sequence) -> list[SparsePolynomial]:
    """Components ``f(z0 + z') - f(z0)`` as polynomials in ``z'``.

    The result vanishes at the origin, so a boundary point over ``z0`` can
    be analysed as if it sat over the origin.
    """
    out = []
    for f in F:
        if len(z0) != f.n:
            raise ValueError("base point dimension mismatch")
        exact = f.exact and all(_is_exact_scalar(x) for x in z0)
        base = [QQi.coerce(x) if exact else complex(x) for x in z0]
        acc: dict = {}
        for gamma, c in f._terms.items():
            c = c if exact else complex(c)
            # expand prod_k (base_k + z'_k)^gamma_k
            partial = {(): c}
            for k, e in enumerate(gamma):
                nxt = {}
                for head, val in partial.items():
                    for j in range(e + 1):
                        coef = comb(e, j) * base[k] ** (e - j) if (e - j) else comb(e, j)
                        if coef == 0:
                            continue
                        key = head + (j,)
                        nxt[key] = nxt.get(key, 0) + val * coef
                partial = nxt
            for g, v in partial.items():
                acc[g] = acc.get(g, 0) + v
        acc.pop((0,) * f.n, None)
        out.append(SparsePolynomial(f.n, acc, exact))
    return out


# ---------------------------------------------------------------------------
# real even series  rho(x, y) = sum c_g x^(2 g1) y^(2 g2)

@dataclass(frozen=True)
class RealSeries:
    """Finite real series ``sum c_g x^(2 g1) y^(2 g2)`` with ``c_g >= 0``.

    ``terms`` is keyed by the *half* exponents ``(g1, g2)``.
    """

    terms: Mapping[tuple[int, int], Fraction | float]

    def __post_init__(self):
        clean = {}
        for g, c in dict(self.terms).items():
            g = (int(g[0]), int(g[1]))
            if len(g) != 2 or min(g) < 0:
                raise ValueError(f"bad exponent {g}")
            if c < 0:
                raise ValueError("real series coefficients must be non-negative")
            if c != 0:
                clean[g] = c
        if not clean:
            raise ValueError("real series needs at least one nonzero term")
        object.__setattr__(self, "terms", clean)

    def full_exponents(self) -> set[tuple[int, int]]:
        """Exponents of the series as a polynomial in ``(x, y)``."""
        return {(2 * a, 2 * b) for a, b in self.terms}

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for (a, b), c in self.terms.items():
            out = out + float(c) * x ** (2 * a) * y ** (2 * b)
        return out

    def to_text(self) -> str:
        poly = SparsePolynomial(2, {(2 * a, 2 * b): c for (a, b), c in self.terms.items()})
        return format_poly(poly, names=["x", "y"])


def parse_real_series(text: str) -> RealSeries:
    """Read ``rho`` written in real variables ``x, y`` (all exponents even)."""
    poly = parse_poly(text, 2, variables={"x": 1, "y": 2})
    terms = {}
    for (e1, e2), c in poly.terms.items():
        if e1 % 2 or e2 % 2:
            raise ParseError(f"exponent ({e1},{e2}) is not even", 0, text)
        if not c.is_real() or c.re < 0:
            raise ParseError("coefficients must be non-negative reals", 0, text)
        terms[(e1 // 2, e2 // 2)] = c.re
    return RealSeries(terms)


def real_delta(rho: RealSeries) -> Fraction:
    """Smallest half-degree ``g1 + g2`` among the nonzero terms of ``rho``."""
    return Fraction(min(a + b for a, b in rho.terms))


def real_kernel_exponent(rho: RealSeries) -> Fraction:
    """Exponent of ``Im w`` in the kernel of ``{Im w > rho}`` at ``(0, w)``: ``-2 - 1/delta``."""
    return -2 - 1 / real_delta(rho)
