"""Exact arithmetic in the Gaussian rationals Q(i)."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class QQi:
    """A complex number ``re + im*i`` with :class:`~fractions.Fraction` parts.

    Instances are immutable and hashable.  Mixed arithmetic with ``int`` and
    ``Fraction`` stays exact; mixing with ``float``/``complex`` is refused so
    that exactness is never lost silently.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("QQi is immutable")

    @classmethod
    def coerce(cls, x) -> "QQi":
        if isinstance(x, QQi):
            return x
        if isinstance(x, (int, Rational)):
            return cls(x, 0)
        raise TypeError(f"cannot convert {type(x).__name__} to QQi exactly")

    # arithmetic --------------------------------------------------------
    def __add__(self, other):
        try:
            o = QQi.coerce(other)
        except TypeError:
            return NotImplemented
        return QQi(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = QQi.coerce(other)
        except TypeError:
            return NotImplemented
        return QQi(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = QQi.coerce(other)
        except TypeError:
            return NotImplemented
        return QQi(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = QQi.coerce(other)
        except TypeError:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        num = self * o.conjugate()
        return QQi(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return QQi.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QQi(1) / (self ** (-k))
        out, base = QQi(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    # comparisons / conversions ------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"QQi({self.re}, {self.im})"

    def __str__(self):
        return format_qqi(self)


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_qqi(c: QQi) -> str:
    """Render ``c`` in a form the polynomial parser reads back exactly."""
    if c.im == 0:
        return _frac_str(c.re)
    im_abs = abs(c.im)
    im_txt = "i" if im_abs == 1 else f"{_frac_str(im_abs)}*i"
    if c.re == 0:
        return im_txt if c.im > 0 else f"-{im_txt}"
    sign = "+" if c.im > 0 else "-"
    return f"({_frac_str(c.re)}{sign}{im_txt})"
