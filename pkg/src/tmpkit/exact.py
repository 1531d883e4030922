"""Exact scalars: rationals (``fractions.Fraction``) and the real quadratic field Q(sqrt D).

Every certificate in the package is computed over one of these two fields.
``QuadExt`` values sharing a radicand form a field; mixing two different
irrational radicands raises ``ValueError``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Union

import mpmath

Rational = Fraction
Scalar = Union[int, Fraction, "QuadExt"]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, QuadExt) and x.v == 0:
        return x.u
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def parse_rational(s: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; floats and exponents are refused."""
    s = s.strip()
    if not s:
        raise ValueError("empty rational literal")
    if any(ch in s for ch in ".eE"):
        raise ValueError(f"not an exact rational literal: {s!r}")
    return Fraction(s)


def format_rational(q) -> str:
    q = as_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def rational_sqrt(x) -> Optional[Fraction]:
    """Return sqrt(x) when x is the square of a rational, else ``None``."""
    x = as_fraction(x)
    if x < 0:
        raise ValueError("rational_sqrt of a negative number")
    p, q = x.numerator, x.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % q for q in range(2, int(p**0.5) + 1))]


def _reduce_radicand(v: Fraction, d: Fraction):
    """Rewrite v*sqrt(d) with an integer radicand free of small square factors."""
    v, n = v / d.denominator, d.numerator * d.denominator
    for p in _SMALL_PRIMES:
        sq = p * p
        if sq > n:
            break
        while n % sq == 0:
            n //= sq
            v *= p
    return v, Fraction(n)


class QuadExt:
    """The number ``u + v*sqrt(radicand)`` with rational ``u, v`` and ``radicand >= 0``.

    A perfect-square radicand is folded into ``u`` at construction, so
    ``v != 0`` always means a genuinely irrational value.  Otherwise the
    radicand is made an integer with small square factors moved into ``v``;
    values over radicands with a square ratio still compare and combine.
    """

    __slots__ = ("u", "v", "radicand")

    def __init__(self, u=0, v=0, radicand=0):
        u, v, radicand = as_fraction(u), as_fraction(v), as_fraction(radicand)
        if radicand < 0:
            raise ValueError("radicand must be nonnegative")
        if v != 0:
            root = rational_sqrt(radicand)
            if root is not None:
                u, v = u + v * root, Fraction(0)
            else:
                v, radicand = _reduce_radicand(v, radicand)
        if v == 0:
            radicand = Fraction(0)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "radicand", radicand)

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    @classmethod
    def _make(cls, u: Fraction, v: Fraction, d: Fraction) -> "QuadExt":
        # d is already known to be a non-square (or v == 0)
        obj = object.__new__(cls)
        object.__setattr__(obj, "u", u)
        object.__setattr__(obj, "v", v)
        object.__setattr__(obj, "radicand", d if v else Fraction(0))
        return obj

    @classmethod
    def sqrt(cls, d) -> "QuadExt":
        return cls(0, 1, d)

    def _coerce(self, other) -> Optional["QuadExt"]:
        if isinstance(other, QuadExt):
            if self.v != 0 and other.v != 0 and self.radicand != other.radicand:
                aligned = other._rewrite(self.radicand)
                if aligned is None:
                    raise ValueError(f"mixed radicands {self.radicand} and {other.radicand}")
                return aligned
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt._make(Fraction(other), Fraction(0), Fraction(0))
        return None

    def _rewrite(self, d: Fraction) -> Optional["QuadExt"]:
        """The same number over sqrt(d), when radicand / d is a rational square."""
        r = rational_sqrt(self.radicand / d)
        return None if r is None else QuadExt._make(self.u, self.v * r, d)

    def _radicand_with(self, other: "QuadExt") -> Fraction:
        return self.radicand if self.v != 0 else other.radicand

    @property
    def is_rational(self) -> bool:
        return self.v == 0

    def conjugate(self) -> "QuadExt":
        return QuadExt._make(self.u, -self.v, self.radicand)

    def norm(self) -> Fraction:
        return self.u * self.u - self.v * self.v * self.radicand

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt._make(self.u + o.u, self.v + o.v, self._radicand_with(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadExt._make(-self.u, -self.v, self.radicand)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt._make(self.u - o.u, self.v - o.v, self._radicand_with(o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self._radicand_with(o)
        return QuadExt._make(
            self.u * o.u + self.v * o.v * d,
            self.u * o.v + self.v * o.u,
            d,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadExt":
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("QuadExt division by zero")
        return QuadExt._make(self.u / nrm, -self.v / nrm, self.radicand)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = QuadExt._make(Fraction(1), Fraction(0), Fraction(0)), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sign(self) -> int:
        su = (self.u > 0) - (self.u < 0)
        sv = (self.v > 0) - (self.v < 0)
        if sv == 0:
            return su
        if su == 0 or su == sv:
            return sv
        # opposite signs: compare u^2 with v^2 D
        lhs, rhs = self.u * self.u, self.v * self.v * self.radicand
        if lhs > rhs:
            return su
        if lhs < rhs:
            return sv
        return 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.v == 0 and self.u == other
        if isinstance(other, QuadExt):
            if self.u != other.u or (self.v == 0) != (other.v == 0):
                return False
            if self.v == 0 or self.radicand == other.radicand:
                return self.v == other.v
            aligned = other._rewrite(self.radicand)
            return aligned is not None and aligned.v == self.v
        return NotImplemented

    def __hash__(self):
        if self.v == 0:
            return hash(self.u)
        return hash((self.u, self.v, self.radicand))

    def __lt__(self, other):
        return sign(self - other) < 0

    def __le__(self, other):
        return sign(self - other) <= 0

    def __gt__(self, other):
        return sign(self - other) > 0

    def __ge__(self, other):
        return sign(self - other) >= 0

    def __bool__(self):
        return self.u != 0 or self.v != 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.to_mpf(mpmath.mp))

    def to_mpf(self, ctx=mpmath.mp):
        val = ctx.mpf(self.u.numerator) / self.u.denominator
        if self.v:
            val += ctx.mpf(self.v.numerator) / self.v.denominator * ctx.sqrt(
                ctx.mpf(self.radicand.numerator) / self.radicand.denominator
            )
        return val

    def __repr__(self):
        if self.v == 0:
            return f"QuadExt({format_rational(self.u)})"
        return (
            f"QuadExt({format_rational(self.u)}, {format_rational(self.v)}, "
            f"{format_rational(self.radicand)})"
        )

    def to_json(self) -> dict:
        return {
            "u": format_rational(self.u),
            "v": format_rational(self.v),
            "radicand": format_rational(self.radicand),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QuadExt":
        return cls(
            parse_rational(obj["u"]),
            parse_rational(obj["v"]),
            parse_rational(obj["radicand"]),
        )


def sign(x) -> int:
    """Exact sign of an int, Fraction or QuadExt."""
    if isinstance(x, QuadExt):
        return x.sign()
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    raise TypeError(f"sign is only exact for rational or quadratic values, got {type(x)}")


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QuadExt))


def to_mpf(x, ctx=mpmath.mp):
    """Convert any supported scalar to an mpf of the context's precision."""
    if isinstance(x, QuadExt):
        return x.to_mpf(ctx)
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return ctx.mpf(x)
    return ctx.mpf(x)


def scalar_to_json(x, digits: int = 40):
    """Strings for rationals, ``{"u","v","radicand"}`` for irrational QuadExt, decimal strings otherwise."""
    if isinstance(x, (int, Fraction)):
        return format_rational(x)
    if isinstance(x, QuadExt):
        return format_rational(x.u) if x.v == 0 else x.to_json()
    return mpmath.nstr(x, digits, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)


def exact_sum(values):
    """Exact sum of rationals and QuadExt values that may use different radicands.

    Irrational parts are collected per radicand; the result is a Fraction
    when they all cancel and a QuadExt when one survives.  Several surviving
    radicands cannot be represented and raise ``ValueError``.
    """
    rational = Fraction(0)
    irr = {}
    for x in values:
        if isinstance(x, QuadExt):
            rational += x.u
            if x.v:
                irr[x.radicand] = irr.get(x.radicand, 0) + x.v
        else:
            rational += as_fraction(x)
    irr = {d: v for d, v in irr.items() if v != 0}
    if not irr:
        return rational
    if len(irr) == 1:
        (d, v), = irr.items()
        return QuadExt._make(rational, v, d)
    raise ValueError("sum spans several quadratic fields")
