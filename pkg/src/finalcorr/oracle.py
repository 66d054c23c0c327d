"""Exact ground truth for correctly rounded reciprocal, division and square root.

Scalar functions work on :class:`fractions.Fraction` values and are correct by
construction. The ``*_bulk`` functions compute the same significands for whole
numpy arrays using only integer arithmetic; they exist so exhaustive sweeps stay
fast and are checked against the scalar path in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import NamedTuple

import numpy as np

from .formats import Binade, FpFormat, RoundingMode

__all__ = [
    "ExactRational", "OracleRangeError", "OracleStats", "Rounded",
    "round_exact", "correctly_rounded_recip", "correctly_rounded_div", "correctly_rounded_sqrt",
    "recip_significand", "div_significand", "sqrt_significand",
    "recip_bulk", "div_bulk", "sqrt_bulk", "BULK_MAX_PRECISION",
]

ExactRational = Fraction

# Largest precision for which every bulk intermediate fits in 64 bits.
BULK_MAX_PRECISION = 24


class OracleRangeError(ArithmeticError):
    """Rounded result would be subnormal or overflow the format."""


@dataclass
class OracleStats:
    """Caller-owned counters. Not synchronised; use one instance per thread."""

    calls: int = 0
    ties: int = 0


class Rounded(NamedTuple):
    significand: int
    exponent: int

    def value(self, fmt: FpFormat) -> Fraction:
        return Binade(self.exponent).value(fmt, self.significand)


def _round_up(q: int, half: bool, sticky: bool, mode: RoundingMode) -> bool:
    # Positive operands only, so toward-zero and toward-minus-infinity coincide.
    if mode is RoundingMode.NEAREST_EVEN:
        return half and (sticky or bool(q & 1))
    if mode is RoundingMode.TOWARD_POS_INF:
        return half or sticky
    return False


def _finish(fmt: FpFormat, q: int, e: int, up: bool) -> Rounded:
    if up:
        q += 1
        if q == 2 * fmt.one:
            q, e = fmt.one, e + 1
    if e < fmt.e_min:
        raise OracleRangeError(f"result exponent {e} below e_min={fmt.e_min} (subnormal)")
    if e > fmt.e_max:
        raise OracleRangeError(f"result exponent {e} above e_max={fmt.e_max} (overflow)")
    return Rounded(q, e)


def round_exact(value, fmt: FpFormat, mode: RoundingMode = RoundingMode.NEAREST_EVEN,
                stats: OracleStats | None = None) -> Rounded:
    """Correctly round a positive rational to a normal number of ``fmt``."""
    value = Fraction(value)
    if value <= 0:
        raise ValueError(f"round_exact needs a positive value, got {value}")
    e = Binade.of(value).exponent
    scaled = value * Fraction(2) ** (fmt.precision_n - e)  # n + 1 integer bits
    t = scaled.numerator // scaled.denominator
    sticky = t != scaled
    half = bool(t & 1)
    q = t >> 1
    if stats is not None:
        stats.calls += 1
        if mode is RoundingMode.NEAREST_EVEN and half and not sticky:
            stats.ties += 1
    return _finish(fmt, q, e, _round_up(q, half, sticky, mode))


def _as_normal(fmt: FpFormat, x) -> Fraction:
    x = Fraction(x)
    if x <= 0:
        raise ValueError(f"operand must be positive, got {x}")
    e = Binade.of(x).exponent
    fmt.check_exponent(e)
    scaled = x * Fraction(2) ** (fmt.fraction_bits - e)
    if scaled.denominator != 1:
        raise ValueError(f"{x} is not representable in {fmt.name}")
    return x


def correctly_rounded_recip(x, fmt: FpFormat, mode: RoundingMode = RoundingMode.NEAREST_EVEN,
                            stats: OracleStats | None = None) -> Fraction:
    x = _as_normal(fmt, x)
    return round_exact(1 / x, fmt, mode, stats).value(fmt)


def correctly_rounded_div(a, b, fmt: FpFormat, mode: RoundingMode = RoundingMode.NEAREST_EVEN,
                          stats: OracleStats | None = None) -> Fraction:
    a, b = _as_normal(fmt, a), _as_normal(fmt, b)
    return round_exact(a / b, fmt, mode, stats).value(fmt)


def _sqrt_round(value: Fraction, fmt: FpFormat, mode: RoundingMode,
                stats: OracleStats | None) -> Rounded:
    # floor(sqrt(value) * 2**(n - e)) from an integer square root plus an
    # exactness test; never needs more than n + 1 root bits and a sticky flag.
    n = fmt.precision_n
    e = Binade.of(value).exponent // 2
    scaled = value * Fraction(4) ** (n - e)
    floor_scaled = scaled.numerator // scaled.denominator
    t = isqrt(floor_scaled)
    sticky = t * t != scaled
    half = bool(t & 1)
    q = t >> 1
    if stats is not None:
        stats.calls += 1
        if mode is RoundingMode.NEAREST_EVEN and half and not sticky:
            stats.ties += 1
    return _finish(fmt, q, e, _round_up(q, half, sticky, mode))


def correctly_rounded_sqrt(x, fmt: FpFormat, mode: RoundingMode = RoundingMode.NEAREST_EVEN,
                           stats: OracleStats | None = None) -> Fraction:
    x = _as_normal(fmt, x)
    return _sqrt_round(x, fmt, mode, stats).value(fmt)


# -- significand-level helpers (inputs in [1, 2), or [1, 4) for sqrt) --------

def _unit_format(n: int) -> FpFormat:
    return FpFormat(f"p{n}", n, 8, 127)


def recip_significand(x_sig: int, n: int, mode: RoundingMode = RoundingMode.NEAREST_EVEN,
                      stats: OracleStats | None = None) -> int:
    """Rounded 1/x for x = x_sig / 2**(n-1) in (1, 2); result bits have place value 2**-n."""
    r = round_exact(Fraction(1 << (n - 1), x_sig), _unit_format(n), mode, stats)
    if r.exponent != -1:
        raise ValueError(f"1/x for x_sig={x_sig:#x} leaves the binade (0.5, 1)")
    return r.significand


def div_significand(a_sig: int, b_sig: int, n: int,
                    mode: RoundingMode = RoundingMode.NEAREST_EVEN,
                    stats: OracleStats | None = None) -> tuple[int, int]:
    """Rounded a/b as (significand, fraction bits): n-1 fraction bits if a >= b else n."""
    r = round_exact(Fraction(a_sig, b_sig), _unit_format(n), mode, stats)
    return r.significand, n - 1 - r.exponent


def sqrt_significand(x_sig: int, scale: int, n: int,
                     mode: RoundingMode = RoundingMode.NEAREST_EVEN,
                     stats: OracleStats | None = None) -> int:
    """Rounded sqrt(scale * x_sig / 2**(n-1)), scale in {1, 2}; result has n-1 fraction bits."""
    if scale not in (1, 2):
        raise ValueError("scale must be 1 or 2")
    r = _sqrt_round(Fraction(scale * x_sig, 1 << (n - 1)), _unit_format(n), mode, stats)
    if r.exponent != 0:
        raise ValueError("square root left the binade [1, 2)")
    return r.significand


# -- bulk integer paths -------------------------------------------------------

def _check_bulk(n: int) -> None:
    if not 2 <= n <= BULK_MAX_PRECISION:
        raise ValueError(f"bulk oracle supports 2 <= n <= {BULK_MAX_PRECISION}, got {n}")


def _bulk_round(q, half_cmp, inexact, mode: RoundingMode):
    """Apply ``mode`` given sign(remainder - half ulp) and an inexact mask."""
    if mode is RoundingMode.NEAREST_EVEN:
        up = (half_cmp > 0) | ((half_cmp == 0) & ((q & np.uint64(1)) == 1))
    elif mode is RoundingMode.TOWARD_POS_INF:
        up = inexact
    else:
        up = np.zeros(q.shape, dtype=bool)
    ties = (half_cmp == 0) if mode is RoundingMode.NEAREST_EVEN else np.zeros(q.shape, dtype=bool)
    return q + up.astype(np.uint64), ties


def recip_bulk(x_sig, n: int, mode: RoundingMode = RoundingMode.NEAREST_EVEN):
    """Vector of rounded reciprocal significands for x_sig in (2**(n-1), 2**n).

    Returns ``(y_sig, ties)``; ``ties`` marks inputs where the nearest-even tie
    rule decided the result.
    """
    _check_bulk(n)
    x = np.asarray(x_sig, dtype=np.uint64)
    num = np.uint64(1 << (2 * n - 1))
    q = num // x
    r = num - q * x
    half_cmp = np.sign((2 * r).astype(np.int64) - x.astype(np.int64))
    return _bulk_round(q, half_cmp, r > 0, mode)


def div_bulk(a_sig, b_sig, n: int, mode: RoundingMode = RoundingMode.NEAREST_EVEN):
    """Rounded quotient significands. Returns ``(q_sig, frac_bits, ties)``."""
    _check_bulk(n)
    a = np.asarray(a_sig, dtype=np.uint64)
    b = np.asarray(b_sig, dtype=np.uint64)
    frac = np.where(a >= b, n - 1, n).astype(np.uint64)
    num = a << frac
    q = num // b
    r = num - q * b
    half_cmp = np.sign((2 * r).astype(np.int64) - b.astype(np.int64))
    q, ties = _bulk_round(q, half_cmp, r > 0, mode)
    return q, frac, ties


def isqrt_bulk(values):
    """Exact floor square roots of non-negative integers below 2**52."""
    v = np.asarray(values, dtype=np.int64)
    y = np.floor(np.sqrt(v.astype(np.float64))).astype(np.int64)
    y = np.where(y * y > v, y - 1, y)
    y = np.where((y + 1) * (y + 1) <= v, y + 1, y)
    return y


def sqrt_bulk(x_sig, scale, n: int, mode: RoundingMode = RoundingMode.NEAREST_EVEN):
    """Rounded sqrt(scale * x) significands with n-1 fraction bits. Returns ``(y_sig, ties)``."""
    _check_bulk(n)
    x = np.asarray(x_sig, dtype=np.int64)
    s = np.broadcast_to(np.asarray(scale, dtype=np.int64), x.shape)
    num = (s * x) << (n - 1)
    y = isqrt_bulk(num)
    inexact = y * y != num
    half_cmp = np.sign(4 * num - (2 * y + 1) ** 2)
    q, ties = _bulk_round(y.astype(np.uint64), half_cmp, inexact, mode)
    return q, ties
