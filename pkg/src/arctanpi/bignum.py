"""Binary fixed-point numbers over arbitrary-size Python integers.

A :class:`FixedPoint` is ``mantissa / 2**scale_bits``.  Every lossy operation
truncates toward zero.  Arithmetic between two values requires identical
scales; use :meth:`FixedPoint.rescale` to convert explicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

DIGIT_CHARS = "0123456789ABCDEF"


class ScaleMismatchError(ValueError):
    pass


def tdiv(n: int, d: int) -> int:
    """Integer division truncating toward zero."""
    q = abs(n) // abs(d)
    return q if (n < 0) == (d < 0) else -q


def cdiv(n: int, d: int) -> int:
    """Ceiling division for positive ``d``."""
    return -((-n) // d)


@dataclass(frozen=True)
class PrecisionContext:
    scale_bits: int
    guard_bits: int = 32

    def __post_init__(self):
        if self.scale_bits < 0:
            raise ValueError("scale_bits must be non-negative")
        if self.guard_bits < 32:
            raise ValueError("guard_bits must be at least 32")

    @property
    def working_bits(self) -> int:
        return self.scale_bits + self.guard_bits

    def with_scale(self, scale_bits: int) -> "PrecisionContext":
        return PrecisionContext(scale_bits, self.guard_bits)


@dataclass(frozen=True, order=False)
class FixedPoint:
    mantissa: int
    scale_bits: int

    def _check(self, other: "FixedPoint") -> None:
        if not isinstance(other, FixedPoint):
            raise TypeError(f"expected FixedPoint, got {type(other).__name__}")
        if other.scale_bits != self.scale_bits:
            raise ScaleMismatchError(
                f"scale mismatch: {self.scale_bits} vs {other.scale_bits}"
            )

    @classmethod
    def zero(cls, scale_bits: int) -> "FixedPoint":
        return cls(0, scale_bits)

    @classmethod
    def one(cls, scale_bits: int) -> "FixedPoint":
        return cls(1 << scale_bits, scale_bits)

    @classmethod
    def from_int(cls, k: int, scale_bits: int) -> "FixedPoint":
        return cls(k << scale_bits, scale_bits)

    def rescale(self, scale_bits: int) -> "FixedPoint":
        """Change scale; reducing it truncates toward zero."""
        shift = scale_bits - self.scale_bits
        if shift >= 0:
            return FixedPoint(self.mantissa << shift, scale_bits)
        return FixedPoint(tdiv(self.mantissa, 1 << -shift), scale_bits)

    def __add__(self, other: "FixedPoint") -> "FixedPoint":
        self._check(other)
        return FixedPoint(self.mantissa + other.mantissa, self.scale_bits)

    def __sub__(self, other: "FixedPoint") -> "FixedPoint":
        self._check(other)
        return FixedPoint(self.mantissa - other.mantissa, self.scale_bits)

    def __neg__(self) -> "FixedPoint":
        return FixedPoint(-self.mantissa, self.scale_bits)

    def __abs__(self) -> "FixedPoint":
        return FixedPoint(abs(self.mantissa), self.scale_bits)

    def __mul__(self, other: "FixedPoint") -> "FixedPoint":
        return mul(self, other)

    def mul_int(self, k: int) -> "FixedPoint":
        return FixedPoint(self.mantissa * k, self.scale_bits)

    def div_int(self, k: int) -> "FixedPoint":
        if k == 0:
            raise ZeroDivisionError("division of FixedPoint by zero")
        return FixedPoint(tdiv(self.mantissa, k), self.scale_bits)

    def __lt__(self, other: "FixedPoint") -> bool:
        self._check(other)
        return self.mantissa < other.mantissa

    def __le__(self, other: "FixedPoint") -> bool:
        self._check(other)
        return self.mantissa <= other.mantissa

    def __gt__(self, other: "FixedPoint") -> bool:
        self._check(other)
        return self.mantissa > other.mantissa

    def __ge__(self, other: "FixedPoint") -> bool:
        self._check(other)
        return self.mantissa >= other.mantissa

    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def ulp(self) -> "FixedPoint":
        return FixedPoint(1, self.scale_bits)

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.scale_bits)

    def __str__(self) -> str:
        digits = max(1, math.ceil(self.scale_bits * math.log10(2)))
        return to_decimal_string(self, digits)

    def __repr__(self) -> str:
        return f"FixedPoint({self.mantissa}, scale_bits={self.scale_bits})"


def from_rational(p: int, q: int, ctx: PrecisionContext) -> FixedPoint:
    if q == 0:
        raise ZeroDivisionError("from_rational: zero denominator")
    return FixedPoint(tdiv(p << ctx.scale_bits, q), ctx.scale_bits)


def from_fraction(value: Fraction, ctx: PrecisionContext) -> FixedPoint:
    value = Fraction(value)
    return from_rational(value.numerator, value.denominator, ctx)


def ceil_fraction(value: Fraction, scale_bits: int) -> FixedPoint:
    """Smallest representable value not below ``value``; used for bounds."""
    value = Fraction(value)
    return FixedPoint(cdiv(value.numerator << scale_bits, value.denominator), scale_bits)


def add(a: FixedPoint, b: FixedPoint) -> FixedPoint:
    return a + b


def sub(a: FixedPoint, b: FixedPoint) -> FixedPoint:
    return a - b


def mul(a: FixedPoint, b: FixedPoint) -> FixedPoint:
    a._check(b)
    return FixedPoint(tdiv(a.mantissa * b.mantissa, 1 << a.scale_bits), a.scale_bits)


def sqrt_int(k: int, ctx: PrecisionContext) -> FixedPoint:
    """Truncated square root of a non-negative integer: ``r <= sqrt(k) < r + ulp``."""
    if k < 0:
        raise ValueError(f"sqrt_int of negative integer {k}")
    return FixedPoint(math.isqrt(k << (2 * ctx.scale_bits)), ctx.scale_bits)


def to_decimal_string(a: FixedPoint, digits: int) -> str:
    """Decimal rendering truncated (not rounded) to ``digits`` fractional digits."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    m = abs(a.mantissa)
    scaled = (m * 10**digits) >> a.scale_bits
    int_part, frac_part = divmod(scaled, 10**digits)
    sign = "-" if a.mantissa < 0 else ""
    return f"{sign}{int_part}.{frac_part:0{digits}d}"


def parse_decimal(text: str, ctx: PrecisionContext) -> FixedPoint:
    """Parse a decimal (or ``p/q``) string exactly, then truncate to ``ctx``.

    No binary floating point is involved.
    """
    try:
        value = Fraction(text.strip().replace("−", "-"))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse {text!r} as a decimal number") from exc
    return from_fraction(value, ctx)


def fraction_digits(a: FixedPoint, base: int, position: int, count: int) -> str:
    """Base-``base`` digits of the fractional part of a non-negative value.

    ``position`` 1 is the first digit after the radix point.
    """
    if a.mantissa < 0:
        raise ValueError("fraction_digits expects a non-negative value")
    if not 2 <= base <= 16:
        raise ValueError("base must be in 2..16")
    mask = (1 << a.scale_bits) - 1
    frac = a.mantissa & mask
    out = []
    for i in range(position + count - 1):
        frac *= base
        d = frac >> a.scale_bits
        frac &= mask
        if i >= position - 1:
            out.append(DIGIT_CHARS[d])
    return "".join(out)
