"""Exact logarithms and rational powers.

Ranks over finite abelian groups are logarithms of integers to the base |S|,
and threshold candidates are rational numbers raised to rational exponents.
Both are kept symbolic here and compared with big-integer arithmetic.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import total_ordering
from typing import Optional, Union

Number = Union[int, Fraction]

_DECIMAL_DIGITS = 80
_MAX_CF_TERMS = 128
_MAX_CF_BITS = 1 << 16


def as_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def rational_log(x: Number, base: Number) -> Optional[Fraction]:
    """Return log_base(x) when it is rational, else None.

    Both arguments must be positive rationals and base must differ from 1.
    The continued-fraction expansion of the logarithm is computed exactly and
    the candidate is verified by exact exponentiation.
    """
    x = as_fraction(x)
    base = as_fraction(base)
    if x <= 0 or base <= 0 or base == 1:
        raise ValueError("rational_log needs x > 0 and base > 0, base != 1")
    sign = 1
    if base < 1:
        base = 1 / base
        sign = -sign
    if x < 1:
        x = 1 / x
        sign = -sign
    original = (x, base)
    terms = []
    # log_b x = q + log_b(x / b^q) and log_b y = 1 / log_y b.
    while x != 1:
        q = 0
        while x >= base:
            x = x / base
            q += 1
        terms.append(q)
        if x == 1:
            break
        if len(terms) > _MAX_CF_TERMS or x.denominator.bit_length() > _MAX_CF_BITS:
            return None
        x, base = base, x
    if not terms:
        return Fraction(0)
    value = Fraction(terms[-1])
    for q in reversed(terms[:-1]):
        value = q + 1 / value
    if not _is_power(original[1], value, original[0]):
        return None
    return sign * value


def _is_power(base: Fraction, exponent: Fraction, target: Fraction) -> bool:
    # base ** (p/q) == target  <=>  base ** p == target ** q
    p, q = exponent.numerator, exponent.denominator
    return _pow(base, p) == _pow(target, q)


def _pow(x: Fraction, e: int) -> Fraction:
    if e >= 0:
        return x ** e
    return (1 / x) ** (-e)


def _ln(x: Fraction) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = _DECIMAL_DIGITS
        return Decimal(x.numerator).ln() - Decimal(x.denominator).ln()


def _ln_float(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


@total_ordering
class ExactLogValue:
    """The real number log_base(image_size), with positive rational arguments.

    A base of 1 marks the trivial group; the value is then 0 and image_size
    must be 1.
    """

    __slots__ = ("image_size", "base")

    def __init__(self, image_size: Number, base: Number):
        image_size = as_fraction(image_size)
        base = as_fraction(base)
        if image_size <= 0:
            raise ValueError("image_size must be positive")
        if base <= 0:
            raise ValueError("base must be positive")
        if base == 1 and image_size != 1:
            raise ValueError("base 1 only admits image_size 1")
        self.image_size = image_size
        self.base = base

    def as_fraction(self) -> Optional[Fraction]:
        if self.image_size == 1:
            return Fraction(0)
        return rational_log(self.image_size, self.base)

    def is_rational(self) -> bool:
        return self.as_fraction() is not None

    def __float__(self) -> float:
        if self.image_size == 1:
            return 0.0
        return _ln_float(self.image_size) / _ln_float(self.base)

    def to_decimal(self) -> Decimal:
        if self.image_size == 1:
            return Decimal(0)
        with localcontext() as ctx:
            ctx.prec = _DECIMAL_DIGITS
            return _ln(self.image_size) / _ln(self.base)

    def _same_base(self, other: "ExactLogValue") -> bool:
        return self.base == other.base and self.base > 1

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            value = self.as_fraction()
            return value is not None and value == other
        if not isinstance(other, ExactLogValue):
            return NotImplemented
        if self.image_size == 1 or other.image_size == 1:
            return self.image_size == other.image_size
        if self._same_base(other):
            return self.image_size == other.image_size
        a, b = self.as_fraction(), other.as_fraction()
        if a is not None or b is not None:
            return a == b
        # log_X Y == log_X' Y' decided through multiplicative dependence:
        # both ratios log_Y' Y and log_X' X must be the same rational number.
        if self.base == other.base:
            return self.image_size == other.image_size
        r_num = rational_log(self.image_size, other.image_size) if other.image_size != 1 else None
        r_den = rational_log(self.base, other.base)
        return r_num is not None and r_den is not None and r_num == r_den

    def __lt__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExactLogValue.from_fraction(Fraction(other))
        if not isinstance(other, ExactLogValue):
            return NotImplemented
        if self == other:
            return False
        if self._same_base(other):
            if self.base > 1:
                return self.image_size < other.image_size
        a, b = self.as_fraction(), other.as_fraction()
        if a is not None and b is not None:
            return a < b
        return self.to_decimal() < other.to_decimal()

    def __hash__(self) -> int:
        value = self.as_fraction()
        if value is not None:
            return hash(value)
        return hash((self.image_size, self.base))

    @staticmethod
    def from_fraction(value: Fraction, base: int = 2) -> "ExactLogValue":
        """Encode a rational value v as log_base(base ** v) when that is rational."""
        value = as_fraction(value)
        if value == 0:
            return ExactLogValue(1, base)
        # log_{b^q}(b^p) = p/q
        p, q = value.numerator, value.denominator
        if p >= 0:
            return ExactLogValue(Fraction(base) ** p, Fraction(base) ** q)
        return ExactLogValue(Fraction(1, base ** (-p)), Fraction(base) ** q)

    def render(self) -> str:
        value = self.as_fraction()
        if value is not None:
            return format_fraction(value)
        return f"log_{format_fraction(self.base)}({format_fraction(self.image_size)})"

    def __repr__(self) -> str:
        return f"ExactLogValue({self.render()} ~ {float(self):.6g})"


def format_fraction(x: Number) -> str:
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _integer_root(x: int, n: int) -> Optional[int]:
    """Exact n-th root of a non-negative integer, or None."""
    if x < 0:
        return None
    if x in (0, 1) or n == 1:
        return x
    r = int(round(x ** (1.0 / n))) if x < (1 << 1000) else 1 << (x.bit_length() // n)
    # Newton refinement for big inputs.
    if r <= 0:
        r = 1
    for _ in range(200):
        nr = ((n - 1) * r + x // (r ** (n - 1))) // n
        if nr >= r:
            break
        r = nr
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** n == x:
            return cand
    return None


def _fraction_root(x: Fraction, n: int) -> Optional[Fraction]:
    num = _integer_root(x.numerator, n)
    den = _integer_root(x.denominator, n)
    if num is None or den is None:
        return None
    return Fraction(num, den)


@total_ordering
class RationalPower:
    """The positive real number coeff * base ** exponent, all rational."""

    __slots__ = ("coeff", "base", "exponent")

    def __init__(self, coeff: Number = 1, base: Number = 1, exponent: Number = 0):
        coeff = as_fraction(coeff)
        base = as_fraction(base)
        exponent = as_fraction(exponent)
        if coeff <= 0 or base <= 0:
            raise ValueError("RationalPower needs positive coefficient and base")
        if base == 1 or exponent == 0:
            base, exponent = Fraction(1), Fraction(0)
        else:
            root = _fraction_root(base, exponent.denominator)
            if root is not None:
                coeff = coeff * _pow(root, exponent.numerator)
                base, exponent = Fraction(1), Fraction(0)
        self.coeff = coeff
        self.base = base
        self.exponent = exponent

    @staticmethod
    def power(base: Number, exponent: Number) -> "RationalPower":
        return RationalPower(1, base, exponent)

    def is_rational(self) -> bool:
        return self.exponent == 0

    def as_fraction(self) -> Optional[Fraction]:
        return self.coeff if self.exponent == 0 else None

    def log(self) -> float:
        return _ln_float(self.coeff) + float(self.exponent) * _ln_float(self.base)

    def __float__(self) -> float:
        return math.exp(self.log())

    def __mul__(self, other: object) -> "RationalPower":
        if isinstance(other, (int, Fraction)):
            return RationalPower(self.coeff * other, self.base, self.exponent)
        if not isinstance(other, RationalPower):
            return NotImplemented
        if other.exponent == 0:
            return RationalPower(self.coeff * other.coeff, self.base, self.exponent)
        if self.exponent == 0:
            return RationalPower(self.coeff * other.coeff, other.base, other.exponent)
        if self.base == other.base:
            return RationalPower(self.coeff * other.coeff, self.base, self.exponent + other.exponent)
        # Common-denominator form: b1^(p1/q) * b2^(p2/q) = (b1^p1 * b2^p2)^(1/q).
        q = math.lcm(self.exponent.denominator, other.exponent.denominator)
        p1 = self.exponent.numerator * (q // self.exponent.denominator)
        p2 = other.exponent.numerator * (q // other.exponent.denominator)
        return RationalPower(
            self.coeff * other.coeff, _pow(self.base, p1) * _pow(other.base, p2), Fraction(1, q)
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalPower":
        return RationalPower(1 / self.coeff, self.base, -self.exponent)

    def __truediv__(self, other: object) -> "RationalPower":
        if isinstance(other, (int, Fraction)):
            return RationalPower(self.coeff / other, self.base, self.exponent)
        if not isinstance(other, RationalPower):
            return NotImplemented
        return self * other.reciprocal()

    def __pow__(self, e: Number) -> "RationalPower":
        e = as_fraction(e)
        if e.denominator == 1:
            n = e.numerator
            return RationalPower(_pow(self.coeff, n), self.base, self.exponent * n)
        # (c * b^x)^e = (c^num * b^(x*num))^(1/den)
        inner = RationalPower(_pow(self.coeff, e.numerator), self.base, self.exponent * e.numerator)
        q = e.denominator
        if inner.exponent == 0:
            return RationalPower(1, inner.coeff, Fraction(1, q))
        d = inner.exponent.denominator
        p = inner.exponent.numerator
        # c^(1/q) * b^(p/(d q)) = (c^d * b^p)^(1/(d q))
        return RationalPower(1, _pow(inner.coeff, d) * _pow(inner.base, p), Fraction(1, d * q))

    def _integer_form(self, q: int) -> Fraction:
        """(self) ** q as an exact rational; q must clear the exponent denominator."""
        p = self.exponent.numerator * (q // self.exponent.denominator)
        return _pow(self.coeff, q) * _pow(self.base, p)

    def _cmp(self, other: "RationalPower") -> int:
        q = math.lcm(self.exponent.denominator, other.exponent.denominator)
        a, b = self._integer_form(q), other._integer_form(q)
        return (a > b) - (a < b)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.exponent == 0 and self.coeff == other
        if not isinstance(other, RationalPower):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalPower(other)
        if not isinstance(other, RationalPower):
            return NotImplemented
        return self._cmp(other) < 0

    def __hash__(self) -> int:
        if self.exponent == 0:
            return hash(self.coeff)
        return hash((self.coeff, self.base, self.exponent))

    def render(self) -> str:
        if self.exponent == 0:
            return format_fraction(self.coeff)
        power = f"({format_fraction(self.base)})^({format_fraction(self.exponent)})"
        if self.coeff == 1:
            return power
        return f"{format_fraction(self.coeff)}*{power}"

    def __repr__(self) -> str:
        return f"RationalPower({self.render()} ~ {float(self):.6g})"
