"""Binary floating-point formats, ulps, binades and explicit-width fixed-point values.

Only normal numbers are modelled. Encodings with an all-zeros exponent field
(zero, subnormals) or an all-ones exponent field (infinities, NaNs) are
rejected with :class:`UnsupportedEncoding`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

__all__ = [
    "FpFormat", "RoundingMode", "Binade", "Fixed", "Decoded",
    "UnsupportedEncoding", "WidthError",
    "DOUBLE", "SINGLE", "HALF_BIAS7", "HALF", "DLFLOAT", "BFLOAT16",
    "BASE_FORMATS", "FORMATS", "get_format",
    "decode", "encode", "ulp", "fixed_mul", "fixed_sub",
    "MAX_FIXED_BITS",
]

MAX_FIXED_BITS = 64


class UnsupportedEncoding(ValueError):
    """Encoding is zero, subnormal, infinite or NaN."""


class WidthError(ArithmeticError):
    """A fixed-point value or result does not fit its declared width."""


class RoundingMode(enum.Enum):
    NEAREST_EVEN = "rne"
    TOWARD_POS_INF = "rup"
    TOWARD_NEG_INF = "rdn"
    TOWARD_ZERO = "rtz"

    @classmethod
    def parse(cls, text: str) -> "RoundingMode":
        key = text.strip().lower()
        aliases = {
            "rne": cls.NEAREST_EVEN, "nearest": cls.NEAREST_EVEN, "nearesteven": cls.NEAREST_EVEN,
            "rup": cls.TOWARD_POS_INF, "ru": cls.TOWARD_POS_INF, "up": cls.TOWARD_POS_INF,
            "towardposinf": cls.TOWARD_POS_INF,
            "rdn": cls.TOWARD_NEG_INF, "rd": cls.TOWARD_NEG_INF, "down": cls.TOWARD_NEG_INF,
            "towardneginf": cls.TOWARD_NEG_INF,
            "rtz": cls.TOWARD_ZERO, "rz": cls.TOWARD_ZERO, "zero": cls.TOWARD_ZERO,
            "towardzero": cls.TOWARD_ZERO,
        }
        try:
            return aliases[key.replace("_", "").replace("-", "")]
        except KeyError:
            raise ValueError(f"unknown rounding mode {text!r}") from None


@dataclass(frozen=True)
class FpFormat:
    """Binary interchange-style format: sign bit, exponent field, stored fraction.

    ``precision_n`` counts the implicit leading one, so a format stores
    ``precision_n - 1`` fraction bits.
    """

    name: str
    precision_n: int
    exponent_bits: int
    bias: int

    def __post_init__(self):
        if self.precision_n < 2:
            raise ValueError(f"precision must be >= 2, got {self.precision_n}")
        if self.exponent_bits < 2:
            raise ValueError(f"exponent field must be >= 2 bits, got {self.exponent_bits}")

    @property
    def fraction_bits(self) -> int:
        return self.precision_n - 1

    @property
    def total_bits(self) -> int:
        return 1 + self.exponent_bits + self.fraction_bits

    @property
    def e_min(self) -> int:
        return 1 - self.bias

    @property
    def e_max(self) -> int:
        return (1 << self.exponent_bits) - 2 - self.bias

    @property
    def one(self) -> int:
        """Significand integer of 1.0, i.e. the implicit bit alone."""
        return 1 << (self.precision_n - 1)

    def check_exponent(self, e: int) -> None:
        if not self.e_min <= e <= self.e_max:
            raise ValueError(f"exponent {e} outside [{self.e_min}, {self.e_max}] for {self.name}")


# HALF_BIAS7 is an 11-bit-precision half with exponent bias 7. HALF is the
# IEEE 754 binary16 layout with bias 15. DLFLOAT uses bias 32.
DOUBLE = FpFormat("double", 53, 11, 1023)
SINGLE = FpFormat("single", 24, 8, 127)
HALF_BIAS7 = FpFormat("half-bias7", 11, 5, 7)
DLFLOAT = FpFormat("dlfloat", 10, 6, 32)
BFLOAT16 = FpFormat("bfloat16", 8, 8, 127)
HALF = FpFormat("half", 11, 5, 15)

BASE_FORMATS = (DOUBLE, SINGLE, HALF_BIAS7, DLFLOAT, BFLOAT16)
FORMATS = {f.name: f for f in (*BASE_FORMATS, HALF)}


def get_format(name: str) -> FpFormat:
    try:
        return FORMATS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown format {name!r}; choose from {', '.join(FORMATS)}") from None


class Decoded(NamedTuple):
    sign: int
    exponent: int
    significand: int

    def value(self, fmt: FpFormat) -> Fraction:
        v = Fraction(self.significand, fmt.one) * Fraction(2) ** self.exponent
        return -v if self.sign else v


def decode(fmt: FpFormat, encoding: int) -> Decoded:
    """Split a normal encoding into (sign, unbiased exponent, significand with implicit bit)."""
    if not 0 <= encoding < (1 << fmt.total_bits):
        raise ValueError(f"encoding 0x{encoding:x} does not fit {fmt.total_bits} bits")
    frac_mask = (1 << fmt.fraction_bits) - 1
    exp_field = (encoding >> fmt.fraction_bits) & ((1 << fmt.exponent_bits) - 1)
    sign = encoding >> (fmt.total_bits - 1)
    if exp_field == 0:
        raise UnsupportedEncoding(f"0x{encoding:x}: zero/subnormal encodings are not supported")
    if exp_field == (1 << fmt.exponent_bits) - 1:
        raise UnsupportedEncoding(f"0x{encoding:x}: infinity/NaN encodings are not supported")
    return Decoded(sign, exp_field - fmt.bias, fmt.one | (encoding & frac_mask))


def encode(fmt: FpFormat, sign: int, exponent: int, significand: int) -> int:
    if sign not in (0, 1):
        raise ValueError("sign must be 0 or 1")
    if not fmt.one <= significand < 2 * fmt.one:
        raise ValueError(f"significand {significand:#x} is not a normal {fmt.precision_n}-bit significand")
    fmt.check_exponent(exponent)
    return (
        (sign << (fmt.total_bits - 1))
        | ((exponent + fmt.bias) << fmt.fraction_bits)
        | (significand - fmt.one)
    )


def ulp(fmt: FpFormat, exponent: int) -> Fraction:
    """Place value of the last significand bit in the binade with this exponent."""
    fmt.check_exponent(exponent)
    return Fraction(2) ** (exponent - (fmt.precision_n - 1))


@dataclass(frozen=True)
class Binade:
    """The half-open interval [2**exponent, 2**(exponent + 1))."""

    exponent: int

    @classmethod
    def of(cls, value: Fraction) -> "Binade":
        value = Fraction(value)
        if value <= 0:
            raise ValueError("binade of a non-positive value")
        e = value.numerator.bit_length() - value.denominator.bit_length()
        if Fraction(2) ** e > value:
            e -= 1
        return cls(e)

    @property
    def low(self) -> Fraction:
        return Fraction(2) ** self.exponent

    def __contains__(self, value) -> bool:
        return self.low <= value < 2 * self.low

    def value(self, fmt: FpFormat, significand: int) -> Fraction:
        if not fmt.one <= significand < 2 * fmt.one:
            raise ValueError(f"significand {significand:#x} is not normal for {fmt.name}")
        return Fraction(significand, fmt.one) * self.low


@dataclass(frozen=True)
class Fixed:
    """Unsigned fixed-point number ``bits * 2**-frac_f`` using at most ``total_p`` bits.

    Mirrors the ``X_p_f`` naming convention: ``frac_f`` may exceed ``total_p``,
    in which case the leading fraction bits are structurally zero, and it may be
    negative after slicing off low-order bits.
    """

    bits: int
    total_p: int
    frac_f: int

    def __post_init__(self):
        if not 0 < self.total_p <= MAX_FIXED_BITS:
            raise WidthError(f"width {self.total_p} outside 1..{MAX_FIXED_BITS}")
        if not 0 <= self.bits < (1 << self.total_p):
            raise WidthError(f"0x{self.bits:x} does not fit in {self.total_p} bits")

    @property
    def value(self) -> Fraction:
        return Fraction(self.bits) / Fraction(2) ** self.frac_f

    @property
    def label(self) -> str:
        return f"({self.total_p},{self.frac_f})"

    def slice(self, upper: int, lower: int) -> "Fixed":
        """Bits ``upper`` down to ``lower`` inclusive; bit ``lower`` keeps its place value."""
        if not 0 <= lower <= upper:
            raise ValueError(f"bad slice [{upper}:{lower}]")
        width = upper - lower + 1
        return Fixed((self.bits >> lower) & ((1 << width) - 1), width, self.frac_f - lower)

    def widen(self, total_p: int) -> "Fixed":
        return Fixed(self.bits, total_p, self.frac_f)

    def narrow(self, total_p: int) -> "Fixed":
        """Re-declare with fewer bits; fails if significant bits would be dropped."""
        return Fixed(self.bits, total_p, self.frac_f)

    def __str__(self):
        return f"0x{self.bits:x}{self.label}"


def fixed_mul(a: Fixed, b: Fixed) -> Fixed:
    width = a.total_p + b.total_p
    if width > MAX_FIXED_BITS:
        raise WidthError(f"product width {a.label}x{b.label} exceeds {MAX_FIXED_BITS} bits")
    return Fixed(a.bits * b.bits, width, a.frac_f + b.frac_f)


def fixed_sub(a: Fixed, b: Fixed) -> Fixed:
    """Exact ``a - b`` at ``a``'s declared width; operands must share a binary point."""
    if a.frac_f != b.frac_f:
        raise ValueError(f"binary points differ: {a.label} - {b.label}")
    if b.bits > a.bits:
        raise WidthError(f"unsigned difference would be negative: {a} - {b}")
    return Fixed(a.bits - b.bits, a.total_p, a.frac_f)
