"""Exact arithmetic in the real quadratic field Q[sqrt 2]."""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from numbers import Rational

__all__ = ["QSqrt2", "SQRT2", "ZERO", "ONE", "parse_number", "as_qsqrt2"]

_RAT = r"[+-]?\d+(?:/\d+)?"
_LITERAL = re.compile(rf"^(?P<p>{_RAT})(?:(?P<q>[+-]\d+(?:/\d+)?)\*r2)?$")
_PURE_IRRATIONAL = re.compile(rf"^(?P<q>{_RAT})\*r2$")


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"expected a rational, got {type(x).__name__}")


@total_ordering
class QSqrt2:
    """The number ``p + q*sqrt(2)`` with rational ``p`` and ``q``.

    Instances are immutable and interoperate with ``int`` and ``Fraction``.
    Comparisons are exact.
    """

    __slots__ = ("p", "q")

    def __init__(self, p=0, q=0):
        object.__setattr__(self, "p", _frac(p))
        object.__setattr__(self, "q", _frac(q))

    def __setattr__(self, name, value):
        raise AttributeError("QSqrt2 is immutable")

    def __reduce__(self):
        return (QSqrt2, (self.p, self.q))

    # -- conversions -------------------------------------------------------
    def __repr__(self) -> str:
        return f"QSqrt2({self.p!s}, {self.q!s})"

    def __str__(self) -> str:
        return format_number(self)

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * 2.0**0.5

    def __bool__(self) -> bool:
        return bool(self.p) or bool(self.q)

    def is_rational(self) -> bool:
        return self.q == 0

    def conjugate(self) -> QSqrt2:
        return QSqrt2(self.p, -self.q)

    def norm(self) -> Fraction:
        """Field norm ``p^2 - 2 q^2``; zero only for zero."""
        return self.p * self.p - 2 * self.q * self.q

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QSqrt2):
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return QSqrt2(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSqrt2(self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QSqrt2(self.p - o.p, self.q - o.q)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return QSqrt2(-self.p, -self.q)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, QSqrt2):
            p, q = self.p, self.q
            return QSqrt2(p * other.p + 2 * q * other.q, p * other.q + q * other.p)
        if isinstance(other, (int, Fraction, Rational)):
            return QSqrt2(self.p * other, self.q * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> QSqrt2:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QSqrt2 division by zero")
        return QSqrt2(self.p / n, -self.q / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.q == 0:
            if o.p == 0:
                raise ZeroDivisionError("QSqrt2 division by zero")
            return QSqrt2(self.p / o.p, self.q / o.p)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- order -------------------------------------------------------------
    def sign(self) -> int:
        """Exact sign of ``p + q*sqrt(2)`` in {-1, 0, 1}."""
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0:
            return sp
        if sp == 0:
            return sq
        if sp == sq:
            return sp
        # opposite signs: the larger of p^2 and 2q^2 wins
        lhs, rhs = self.p * self.p, 2 * self.q * self.q
        if lhs == rhs:  # impossible for nonzero rationals, kept for safety
            return 0
        return sp if lhs > rhs else sq

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.p == o.p and self.q == o.q

    def __hash__(self):
        if self.q == 0:
            return hash(self.p)
        return hash((self.p, self.q))

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def max_denominator(self) -> int:
        return max(self.p.denominator, self.q.denominator)


ZERO = QSqrt2(0)
ONE = QSqrt2(1)
SQRT2 = QSqrt2(0, 1)


def as_qsqrt2(x) -> QSqrt2:
    if isinstance(x, QSqrt2):
        return x
    return QSqrt2(_frac(x))


def sign(x) -> int:
    return as_qsqrt2(x).sign()


def format_number(x) -> str:
    """Render in the literal grammar ``a/b``, ``a/b+c/d*r2`` or ``a/b-c/d*r2``."""
    x = as_qsqrt2(x)
    head = str(x.p)
    if x.q == 0:
        return head
    tail = str(x.q)
    if not tail.startswith("-"):
        tail = "+" + tail
    return f"{head}{tail}*r2"


def parse_number(text: str) -> QSqrt2:
    """Parse a number literal; raises ``ValueError`` on malformed input."""
    s = text.strip()
    try:
        m = _LITERAL.match(s)
        if m is not None:
            q = m.group("q")
            return QSqrt2(Fraction(m.group("p")), Fraction(q) if q else 0)
        m = _PURE_IRRATIONAL.match(s)
        if m is not None:
            return QSqrt2(0, Fraction(m.group("q")))
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {text!r}") from None
    raise ValueError(f"malformed number literal {text!r}")
