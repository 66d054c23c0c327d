"""Exact classification of results and brute-force midpoint scans.

A positive rational either has a finite binary expansion (its reduced
denominator is a power of two) or an infinite one. A finite expansion spanning
``k`` significant bits is representable at every precision ``m >= k`` and is a
rounding midpoint at precision ``m`` exactly when ``k == m + 1``.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import NamedTuple

from .formats import Binade

__all__ = [
    "VerdictKind", "Verdict", "Witness", "ScanReport", "ScanLimits", "DEFAULT_LIMITS",
    "expansion_bits", "classify_exact", "classify_sqrt",
    "scan_reciprocal_midpoints", "scan_division_midpoints", "scan_sqrt_midpoints",
    "reciprocal_exponent", "quotient_exponent",
]


class VerdictKind(enum.Enum):
    REPRESENTABLE = "representable"
    MIDPOINT = "midpoint"
    FINITE_EXPANSION = "finite"
    INFINITE_EXPANSION = "infinite"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    precision: int | None = None  # m for REPRESENTABLE / MIDPOINT
    bits: int | None = None  # significant bits of a finite expansion
    irrational: bool = False

    def __str__(self):
        if self.kind is VerdictKind.INFINITE_EXPANSION:
            return "irrational" if self.irrational else "infinite"
        if self.kind is VerdictKind.FINITE_EXPANSION:
            return f"finite({self.bits})"
        return f"{self.kind.value}({self.precision})"


def expansion_bits(value: Fraction) -> int | None:
    """Significant bits of a finite binary expansion, or None if it is infinite."""
    value = Fraction(value)
    den = value.denominator
    if den & (den - 1):
        return None
    num = abs(value.numerator)
    num >>= (num & -num).bit_length() - 1
    return num.bit_length()


def classify_exact(value, m: int) -> Verdict:
    value = Fraction(value)
    if value <= 0:
        raise ValueError(f"classify_exact needs a positive value, got {value}")
    if m < 1:
        raise ValueError("precision must be positive")
    bits = expansion_bits(value)
    if bits is None:
        return Verdict(VerdictKind.INFINITE_EXPANSION)
    if bits <= m:
        return Verdict(VerdictKind.REPRESENTABLE, precision=m, bits=bits)
    if bits == m + 1:
        return Verdict(VerdictKind.MIDPOINT, precision=m, bits=bits)
    return Verdict(VerdictKind.FINITE_EXPANSION, bits=bits)


def _rational_sqrt(value: Fraction) -> Fraction | None:
    num, den = value.numerator, value.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def classify_sqrt(value, m: int) -> Verdict:
    """Classify sqrt(value); irrational roots are reported as infinite expansions."""
    value = Fraction(value)
    if value <= 0:
        raise ValueError(f"classify_sqrt needs a positive value, got {value}")
    root = _rational_sqrt(value)
    if root is None:
        return Verdict(VerdictKind.INFINITE_EXPANSION, irrational=True)
    return classify_exact(root, m)


def reciprocal_exponent(e: int, is_power_of_two: bool) -> int:
    return -e if is_power_of_two else -e - 1


def quotient_exponent(p: int, q: int, a_sig: int, b_sig: int) -> int:
    return p - q if a_sig >= b_sig else p - q - 1


class Witness(NamedTuple):
    operation: str
    A: int
    B: int | None  # divisor significand for div
    scale: int  # input binade scale for sqrt (1 or 2), else 1
    C: int  # lower neighbouring significand at precision m
    m: int
    e: int
    verdict: Verdict
    boundary: bool  # C == 2**(m-1): lower neighbour is a power of two


def _witness(op: str, a: int, b: int | None, scale: int, value: Fraction, m: int,
             verdict: Verdict) -> Witness:
    e = Binade.of(value).exponent
    scaled = value * Fraction(2) ** (m - 1 - e)
    c = scaled.numerator // scaled.denominator
    return Witness(op, a, b, scale, c, m, e, verdict, c == 1 << (m - 1))


@dataclass
class ScanReport:
    operation: str
    input_precision_n: int
    output_precision_m: int
    inputs_scanned: int = 0
    midpoint_hits: list[Witness] = field(default_factory=list)
    exact_hits: list[Witness] = field(default_factory=list)
    irrational: int = 0

    @property
    def boundary_midpoints(self) -> list[Witness]:
        return [w for w in self.midpoint_hits if w.boundary]

    def record(self, w: Witness) -> None:
        if w.verdict.kind is VerdictKind.MIDPOINT:
            self.midpoint_hits.append(w)
        elif w.verdict.kind is VerdictKind.REPRESENTABLE:
            self.exact_hits.append(w)

    def merge(self, other: "ScanReport") -> None:
        self.inputs_scanned += other.inputs_scanned
        self.midpoint_hits.extend(other.midpoint_hits)
        self.exact_hits.extend(other.exact_hits)
        self.irrational += other.irrational

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["operation", "n", "m", "A", "B", "verdict"])
        for w in self.midpoint_hits + self.exact_hits:
            b = w.B if w.B is not None else ("" if w.scale == 1 else f"x{w.scale}")
            writer.writerow([self.operation, self.input_precision_n, w.m, w.A, b,
                             w.verdict.kind.value])
        return out.getvalue()

    def to_text(self) -> str:
        lines = [
            f"{self.operation}: n={self.input_precision_n} m={self.output_precision_m} "
            f"inputs={self.inputs_scanned} midpoints={len(self.midpoint_hits)} "
            f"(boundary {len(self.boundary_midpoints)}) exact={len(self.exact_hits)}"
            + (f" irrational={self.irrational}" if self.operation == "sqrt" else "")
        ]
        if self.midpoint_hits or self.exact_hits:
            lines.append(f"{'kind':<14}{'A':>8}{'B':>8}{'scale':>6}{'C':>8}{'m':>4}{'e':>4}  boundary")
            for w in self.midpoint_hits + self.exact_hits:
                lines.append(
                    f"{w.verdict.kind.value:<14}{w.A:>8}{'' if w.B is None else w.B:>8}"
                    f"{w.scale:>6}{w.C:>8}{w.m:>4}{w.e:>4}  {'yes' if w.boundary else ''}"
                )
        return "\n".join(lines)


@dataclass(frozen=True)
class ScanLimits:
    """Largest input precision each scan accepts; keeps runs at desk scale."""

    recip: int = 16
    div: int = 10
    sqrt: int = 12


DEFAULT_LIMITS = ScanLimits()


def _check(n: int, m: int, limit: int, op: str) -> None:
    if n < 2:
        raise ValueError("input precision must be >= 2")
    if n > limit:
        raise ValueError(f"{op} scan limited to n <= {limit}, got n={n}")
    if m < 2:
        raise ValueError("output precision must be >= 2")


def _interior(n: int) -> range:
    return range((1 << (n - 1)) + 1, 1 << n)


def scan_reciprocal_midpoints(n: int, m: int, limits: ScanLimits = DEFAULT_LIMITS) -> ScanReport:
    """Classify 1/x for every x = A/2**(n-1) with A strictly inside (2**(n-1), 2**n)."""
    _check(n, m, limits.recip, "reciprocal")
    report = ScanReport("recip", n, m)
    one = 1 << (n - 1)
    for a in _interior(n):
        value = Fraction(one, a)
        report.inputs_scanned += 1
        verdict = classify_exact(value, m)
        if verdict.kind in (VerdictKind.MIDPOINT, VerdictKind.REPRESENTABLE):
            report.record(_witness("recip", a, None, 1, value, m, verdict))
    return report


def scan_division_midpoints(n: int, m: int, limits: ScanLimits = DEFAULT_LIMITS) -> ScanReport:
    """Classify A/B for all distinct A, B strictly inside (2**(n-1), 2**n)."""
    _check(n, m, limits.div, "division")
    report = ScanReport("div", n, m)
    for a in _interior(n):
        for b in _interior(n):
            if a == b:
                continue
            value = Fraction(a, b)
            report.inputs_scanned += 1
            verdict = classify_exact(value, m)
            if verdict.kind in (VerdictKind.MIDPOINT, VerdictKind.REPRESENTABLE):
                report.record(_witness("div", a, b, 1, value, m, verdict))
    return report


def scan_sqrt_midpoints(n: int, m: int | None = None, limits: ScanLimits = DEFAULT_LIMITS) -> ScanReport:
    """Classify sqrt(x) for x = s*A/2**(n-1), s in {1, 2}, A strictly inside the binade."""
    m = n if m is None else m
    _check(n, m, limits.sqrt, "sqrt")
    report = ScanReport("sqrt", n, m)
    for scale in (1, 2):
        for a in _interior(n):
            x = Fraction(scale * a, 1 << (n - 1))
            report.inputs_scanned += 1
            root = _rational_sqrt(x)
            if root is None:
                report.irrational += 1
                continue
            verdict = classify_exact(root, m)
            if verdict.kind in (VerdictKind.MIDPOINT, VerdictKind.REPRESENTABLE):
                report.record(_witness("sqrt", a, None, scale, root, m, verdict))
    return report
