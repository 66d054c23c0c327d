"""Correction variants and the structured errors raised by the kernels."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property


class CorrectionError(ArithmeticError):
    """A kernel refused its input instead of returning a possibly wrong result."""

    def __init__(self, check: str, **values):
        self.check = check
        self.values = values
        detail = ", ".join(f"{k}=0x{v:x}" if isinstance(v, int) and v >= 0 else f"{k}={v}"
                           for k, v in values.items())
        super().__init__(f"{check} violated ({detail})" if detail else check)


class PreconditionError(CorrectionError):
    """A width-ledger assertion of the fixed-point datapath failed."""


class ErrorBoundExceeded(CorrectionError):
    """The residual lies outside the outermost correction interval."""


class KernelStatus(enum.IntEnum):
    """Per-element outcome codes for the vectorised kernels."""

    OK = 0
    RESIDUAL_NEGATIVE = 1
    RESIDUAL_TOO_WIDE = 2
    CORRECTION_TOO_WIDE = 3
    BOUND_EXCEEDED = 4


@dataclass(frozen=True)
class CorrectionConfig:
    """Leading-bit multiply used to pick the correction C for the reciprocal kernel.

    For precision ``n`` the correction is
    ``C = ((R >> residual_shift(n)) * (Y >> approx_shift(n)) + rounding_addend) >> shift_after_mul``
    where ``residual_guard_bits`` is the number of residual-operand bits below
    the ulp of the result. ``c_limit`` is the exclusive bound the datapath
    asserts on C. ``max_correctable_ulps`` is the advertised bound; the
    harness measures the real one.
    """

    name: str
    residual_leading_bits: int
    approx_leading_bits: int
    rounding_addend: int | None
    max_correctable_ulps: int
    shift_after_mul: int
    residual_guard_bits: int
    c_limit: int = 8

    def __post_init__(self):
        if self.shift_after_mul != self.residual_guard_bits + self.approx_leading_bits:
            raise ValueError("shift_after_mul must realign the product to ulp units")
        if self.max_correctable_ulps >= 8 or self.c_limit > 8:
            raise ValueError("C is a 3-bit quantity")

    def residual_shift(self, n: int) -> int:
        return n - 1 - self.residual_guard_bits

    def approx_shift(self, n: int) -> int:
        return n - self.approx_leading_bits

    @property
    def addend(self) -> int:
        return self.rounding_addend or 0

    @property
    def c_bits(self) -> int:
        return (self.c_limit - 1).bit_length()


# At single precision these give R >> 22, Y >> 20 for 5x4r and R >> 21, Y >> 21
# for the two narrower variants.
VARIANT_4X3 = CorrectionConfig("4x3", 4, 3, None, 3, 5, 2, c_limit=4)
VARIANT_5X3R = CorrectionConfig("5x3r", 5, 3, 1 << 4, 6, 5, 2)
VARIANT_5X4R = CorrectionConfig("5x4r", 5, 4, 1 << 4, 7, 5, 1)

VARIANTS = {v.name: v for v in (VARIANT_4X3, VARIANT_5X3R, VARIANT_5X4R)}


def get_variant(name: str) -> CorrectionConfig:
    try:
        return VARIANTS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown variant {name!r}; choose from {', '.join(VARIANTS)}") from None


@dataclass(frozen=True)
class TableCorrectionConfig:
    """Correction estimate for division and square root.

    The residual's leading ``residual_leading_bits`` are multiplied by a
    reciprocal read from a small table indexed by the leading
    ``table_index_bits`` of the divisor (division) or of the root estimate
    (square root).
    """

    name: str = "table7x7"
    residual_leading_bits: int = 7
    table_index_bits: int = 7
    max_correctable_ulps: int = 7
    c_limit: int = 8

    def residual_shift(self, n: int, sqrt: bool = False) -> int:
        # residual < 2**(n+3) for division, < 2**(n+4) for square root
        return n + (4 if sqrt else 3) - self.residual_leading_bits

    @property
    def table_shift(self) -> int:
        return self.residual_leading_bits + self.table_index_bits - 4

    @cached_property
    def table(self) -> tuple[int, ...]:
        """round(2**(2t-1) / b) for every t-bit index b with its top bit set."""
        t = self.table_index_bits
        num = 1 << (2 * t - 1)
        return tuple((num + b // 2) // b for b in range(1 << (t - 1), 1 << t))

    def lookup(self, index: int) -> int:
        return self.table[index - (1 << (self.table_index_bits - 1))]


DIV_DEFAULT = TableCorrectionConfig("div7x7")
SQRT_DEFAULT = TableCorrectionConfig("sqrt7x7")
