"""Exhaustive and sampled verification of the correction kernels against the oracle.

Approximations are built by offsetting an oracle result by whole ulps. With
``Reference.ROUNDED`` the offset is applied to the correctly rounded result
(the convention of the original C harness); with ``Reference.TRUNCATED`` it is
applied to the result rounded toward zero, so offset ``-k`` always means an
underestimate by between ``k`` and ``k + 1`` ulps. Approximations that leave the
output binade are skipped and counted.
"""

from __future__ import annotations

import csv
import enum
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from . import oracle
from .correction import batch
from .correction.config import (
    DIV_DEFAULT, SQRT_DEFAULT, CorrectionConfig, CorrectionError, KernelStatus,
    TableCorrectionConfig, VARIANT_5X4R,
)
from .correction.recip import trace_recip_fixed, RecipTrace
from .formats import SINGLE, Fixed, FpFormat, RoundingMode

__all__ = [
    "Operation", "Reference", "InputRange", "SweepSpec", "SweepResult", "Failure", "OffsetTally",
    "batch_sweep", "individual_case", "CaseReport", "discover_max_correctable",
    "host_float_crosscheck", "parse_offsets",
]

CHUNK = 1 << 20
MAX_EXHAUSTIVE_DIV = 12


class Operation(str, enum.Enum):
    RECIP = "recip"
    DIV = "div"
    SQRT = "sqrt"


class Reference(str, enum.Enum):
    ROUNDED = "rounded"
    TRUNCATED = "truncated"


class InputRange(str, enum.Enum):
    INTERIOR = "binade"  # powers of two excluded
    FULL = "full"


@dataclass(frozen=True)
class SweepSpec:
    operation: Operation
    format: FpFormat = SINGLE
    variant: CorrectionConfig | TableCorrectionConfig | None = None
    error_offsets: tuple[int, ...] = (0, -1, -2, -3, -4, -5, -6, -7)
    input_range: InputRange = InputRange.INTERIOR
    mode: RoundingMode = RoundingMode.NEAREST_EVEN
    reference: Reference = Reference.ROUNDED
    # None selects the fixed-point underestimate kernel; an integer selects the
    # signed-error reciprocal kernel with that error bound.
    general_bound: int | None = None
    sample: int | None = None
    seed: int = 0
    threads: int = 1
    max_recorded: int = 100

    def __post_init__(self):
        object.__setattr__(self, "operation", Operation(self.operation))
        object.__setattr__(self, "error_offsets", tuple(self.error_offsets))
        object.__setattr__(self, "reference", Reference(self.reference))
        object.__setattr__(self, "input_range", InputRange(self.input_range))
        if not isinstance(self.mode, RoundingMode):
            object.__setattr__(self, "mode", RoundingMode.parse(self.mode))
        if self.variant is None:
            default = {Operation.RECIP: VARIANT_5X4R, Operation.DIV: DIV_DEFAULT,
                       Operation.SQRT: SQRT_DEFAULT}[self.operation]
            object.__setattr__(self, "variant", default)
        if self.general_bound is None:
            if any(k > 0 for k in self.error_offsets):
                raise ValueError("positive offsets need the signed-error kernel (general_bound)")
            if self.mode is not RoundingMode.NEAREST_EVEN:
                raise ValueError("directed modes need the signed-error kernel (general_bound)")
        elif self.operation is not Operation.RECIP:
            raise ValueError("the signed-error kernel exists for reciprocal only")
        if any(abs(k) > 16 for k in self.error_offsets):
            raise ValueError("offsets are limited to |k| <= 16")
        if self.operation is Operation.RECIP and self.general_bound is None \
                and not isinstance(self.variant, CorrectionConfig):
            raise ValueError("reciprocal sweeps take a CorrectionConfig variant")
        if self.operation is not Operation.RECIP and not isinstance(self.variant, TableCorrectionConfig):
            raise ValueError("division and square root sweeps take a TableCorrectionConfig")
        n = self.format.precision_n
        if not 8 <= n <= batch.MAX_BATCH_PRECISION:
            raise ValueError(f"sweeps support precisions 8..{batch.MAX_BATCH_PRECISION}, got {n}")
        if self.operation is Operation.DIV and self.sample is None and n > MAX_EXHAUSTIVE_DIV:
            raise ValueError(f"exhaustive division is limited to n <= {MAX_EXHAUSTIVE_DIV}; pass sample=")

    @property
    def variant_name(self) -> str:
        if self.general_bound is not None:
            return f"general(+-{self.general_bound})"
        return self.variant.name


class Failure(NamedTuple):
    x: int  # input significand (dividend for div)
    y: int | None  # divisor significand for div, binade scale for sqrt
    offset: int
    expected: int
    got: int
    status: str


class OffsetTally(NamedTuple):
    cases: int
    skipped: int
    failures: int


@dataclass
class SweepResult:
    spec: SweepSpec
    cases_run: int = 0
    skipped: int = 0
    failure_count: int = 0
    failures: list[Failure] = field(default_factory=list)
    tie_counter: int = 0  # kernel comparisons that met exact equality
    oracle_ties: int = 0  # oracle results decided by the nearest-even tie rule
    status_counts: dict[str, int] = field(default_factory=dict)
    per_offset: dict[int, OffsetTally] = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failure_count == 0 and self.tie_counter == 0

    def merge(self, other: "SweepResult") -> None:
        self.cases_run += other.cases_run
        self.skipped += other.skipped
        self.failure_count += other.failure_count
        room = self.spec.max_recorded - len(self.failures)
        self.failures.extend(other.failures[:max(room, 0)])
        self.tie_counter += other.tie_counter
        self.oracle_ties += other.oracle_ties
        for k, v in other.status_counts.items():
            self.status_counts[k] = self.status_counts.get(k, 0) + v
        for k, t in other.per_offset.items():
            a = self.per_offset.get(k, OffsetTally(0, 0, 0))
            self.per_offset[k] = OffsetTally(a.cases + t.cases, a.skipped + t.skipped,
                                             a.failures + t.failures)

    def summary(self) -> str:
        s = self.spec
        lines = [
            f"{s.operation.value} {s.format.name} variant={s.variant_name} mode={s.mode.value} "
            f"reference={s.reference.value} inputs={'sample of %d' % s.sample if s.sample else s.input_range.value}",
            f"{'offset':>7} {'cases':>10} {'skipped':>8} {'failures':>9}",
        ]
        for k in sorted(self.per_offset, reverse=True):
            t = self.per_offset[k]
            lines.append(f"{k:>7} {t.cases:>10} {t.skipped:>8} {t.failures:>9}")
        if self.status_counts:
            lines.append("failure kinds: " + ", ".join(f"{k}={v}" for k, v in sorted(self.status_counts.items())))
        lines.append(f"cases={self.cases_run} skipped={self.skipped} equality={self.tie_counter} "
                     f"oracle_ties={self.oracle_ties} runtime={self.runtime:.2f}s")
        lines.append(f"{self.failure_count} failures")
        return "\n".join(lines)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["operation", "x", "y", "offset", "expected", "got", "status"])
        for f in self.failures:
            w.writerow([self.spec.operation.value, f"{f.x:x}", "" if f.y is None else f"{f.y:x}",
                        f.offset, f"{f.expected:x}", f"{f.got:x}", f.status])
        return out.getvalue()


def parse_offsets(text: str) -> tuple[int, ...]:
    """Parse ``-7..0``, ``-3,-1,0`` or a mix into a descending-magnitude-agnostic tuple."""
    offsets: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo_s, hi_s = part.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if lo > hi:
                lo, hi = hi, lo
            offsets.extend(range(hi, lo - 1, -1))
        else:
            offsets.append(int(part))
    if not offsets:
        raise ValueError(f"no offsets in {text!r}")
    return tuple(dict.fromkeys(offsets))


# -- input generation ---------------------------------------------------------

def _recip_inputs(spec: SweepSpec) -> Iterator[tuple]:
    n = spec.format.precision_n
    one = 1 << (n - 1)
    if spec.sample:
        rng = np.random.default_rng(spec.seed)
        for start in range(0, spec.sample, CHUNK):
            size = min(CHUNK, spec.sample - start)
            yield (rng.integers(one + 1, 2 * one, size=size, dtype=np.int64),)
        return
    first = one if spec.input_range is InputRange.FULL else one + 1
    for start in range(first, 2 * one, CHUNK):
        yield (np.arange(start, min(start + CHUNK, 2 * one), dtype=np.int64),)


def _div_inputs(spec: SweepSpec) -> Iterator[tuple]:
    n = spec.format.precision_n
    one = 1 << (n - 1)
    lo = one if spec.input_range is InputRange.FULL else one + 1
    if spec.sample:
        rng = np.random.default_rng(spec.seed)
        for start in range(0, spec.sample, CHUNK):
            size = min(CHUNK, spec.sample - start)
            yield (rng.integers(lo, 2 * one, size=size, dtype=np.int64),
                   rng.integers(lo, 2 * one, size=size, dtype=np.int64))
        return
    values = np.arange(lo, 2 * one, dtype=np.int64)
    rows = max(1, CHUNK // len(values))
    for start in range(0, len(values), rows):
        a = values[start:start + rows]
        A, B = np.meshgrid(a, values, indexing="ij")
        yield A.ravel(), B.ravel()


def _sqrt_inputs(spec: SweepSpec) -> Iterator[tuple]:
    n = spec.format.precision_n
    one = 1 << (n - 1)
    lo = one if spec.input_range is InputRange.FULL else one + 1
    if spec.sample:
        rng = np.random.default_rng(spec.seed)
        for start in range(0, spec.sample, CHUNK):
            size = min(CHUNK, spec.sample - start)
            yield (rng.integers(lo, 2 * one, size=size, dtype=np.int64),
                   rng.integers(1, 3, size=size, dtype=np.int64))
        return
    for scale in (1, 2):
        for start in range(lo, 2 * one, CHUNK):
            x = np.arange(start, min(start + CHUNK, 2 * one), dtype=np.int64)
            yield x, np.full(x.shape, scale, dtype=np.int64)


_INPUTS = {Operation.RECIP: _recip_inputs, Operation.DIV: _div_inputs, Operation.SQRT: _sqrt_inputs}


# -- one chunk ----------------------------------------------------------------

def _truth(spec: SweepSpec, args: tuple, mode: RoundingMode):
    n = spec.format.precision_n
    if spec.operation is Operation.RECIP:
        y, ties = oracle.recip_bulk(args[0], n, mode)
        # 1/1 is reported as one in the input's binade, like the kernels do
        return np.where(args[0] == 1 << (n - 1), 1 << (n - 1), y.astype(np.int64)), ties
    if spec.operation is Operation.DIV:
        q, _, ties = oracle.div_bulk(args[0], args[1], n, mode)
        return q.astype(np.int64), ties
    y, ties = oracle.sqrt_bulk(args[0], args[1], n, mode)
    return y.astype(np.int64), ties


def _run_kernel(spec: SweepSpec, args: tuple, approx) -> batch.BatchResult:
    n = spec.format.precision_n
    if spec.operation is Operation.RECIP:
        if spec.general_bound is not None:
            return batch.recip_general_batch(args[0], approx, spec.general_bound, spec.mode, n)
        return batch.recip_fixed_batch(args[0], approx, spec.variant, n)
    if spec.operation is Operation.DIV:
        return batch.div_batch(args[0], args[1], approx, spec.variant, n)
    return batch.sqrt_batch(args[0], args[1], approx, spec.variant, n)


def _sweep_chunk(spec: SweepSpec, args: tuple) -> SweepResult:
    n = spec.format.precision_n
    one = 1 << (n - 1)
    out = SweepResult(spec)
    expected, ties = _truth(spec, args, spec.mode)
    out.oracle_ties = int(ties.sum())
    if spec.reference is Reference.TRUNCATED:
        base, _ = _truth(spec, args, RoundingMode.TOWARD_ZERO)
    else:
        base = expected
    # Power-of-two inputs map to a different output binade; the kernels
    # short-circuit them and the oracle reports the significand of one.
    special = _special_inputs(spec, args)
    for k in spec.error_offsets:
        approx = base + k
        keep = ((approx >= one) & (approx < 2 * one)) | special
        cases = int(keep.sum())
        skipped = int(keep.size - cases)
        sel = tuple(a[keep] for a in args)
        res = _run_kernel(spec, sel, approx[keep])
        want = expected[keep]
        bad = (res.result != want) | (res.status != KernelStatus.OK)
        nbad = int(bad.sum())
        out.cases_run += cases
        out.skipped += skipped
        out.failure_count += nbad
        out.tie_counter += int(res.equality.sum())
        out.per_offset[k] = OffsetTally(cases, skipped, nbad)
        if nbad:
            codes, counts = np.unique(res.status[bad], return_counts=True)
            for c, m in zip(codes, counts):
                name = _status_name(int(c))
                out.status_counts[name] = out.status_counts.get(name, 0) + int(m)
            room = spec.max_recorded - len(out.failures)
            for i in np.flatnonzero(bad)[:max(room, 0)]:
                y = int(sel[1][i]) if len(sel) > 1 else None
                out.failures.append(Failure(int(sel[0][i]), y, k, int(want[i]), int(res.result[i]),
                                            _status_name(int(res.status[i]))))
    return out


def _status_name(code: int) -> str:
    return "wrong_result" if code == KernelStatus.OK else KernelStatus(code).name.lower()


def _special_inputs(spec: SweepSpec, args: tuple):
    n = spec.format.precision_n
    one = 1 << (n - 1)
    if spec.operation is Operation.RECIP:
        return args[0] == one
    if spec.operation is Operation.DIV:
        return (args[0] == args[1]) | (args[1] == one)
    return args[0] * args[1] == one


def batch_sweep(spec: SweepSpec) -> SweepResult:
    """Run every input/offset pair of ``spec`` and compare with the oracle.

    Inputs are split into fixed stripes; with ``threads > 1`` stripes run
    concurrently and are merged in stripe order, so results do not depend on
    the thread count.
    """
    start = time.perf_counter()
    chunks = list(_INPUTS[spec.operation](spec))
    result = SweepResult(spec)
    if spec.threads > 1:
        with ThreadPoolExecutor(spec.threads) as pool:
            parts = list(pool.map(lambda c: _sweep_chunk(spec, c), chunks))
    else:
        parts = [_sweep_chunk(spec, c) for c in chunks]
    for part in parts:
        result.merge(part)
    for k in spec.error_offsets:
        result.per_offset.setdefault(k, OffsetTally(0, 0, 0))
    result.runtime = time.perf_counter() - start
    return result


def discover_max_correctable(variant, operation: Operation = Operation.RECIP, fmt: FpFormat = SINGLE,
                             reference: Reference = Reference.ROUNDED, limit: int = 9,
                             sample: int | None = None, threads: int = 1) -> int:
    """Largest k such that offsets -1..-k (rounded) or 0..-k (truncated) all pass.

    With the rounded reference offset 0 is excluded: a correctly rounded result
    overestimates the exact value for about half the inputs and so is outside
    the underestimate kernels' domain.
    """
    best = 0
    first = 1 if reference is Reference.ROUNDED else 0
    for k in range(first, limit + 1):
        spec = SweepSpec(Operation(operation), fmt, variant, (-k,), reference=reference,
                         sample=sample, threads=threads, max_recorded=0)
        if batch_sweep(spec).failure_count:
            break
        best = k
    return best


# -- single cases -------------------------------------------------------------

@dataclass
class CaseReport:
    x: int
    ulp_err: int
    n: int
    expected: int
    approx: int
    trace: RecipTrace | None = None
    error: str | None = None
    skipped: bool = False

    @property
    def passed(self) -> bool:
        return (not self.skipped and self.error is None and self.trace is not None
                and self.trace.result.bits == self.expected)

    def to_text(self) -> str:
        n = self.n
        lines = [
            f"X_{n}_{n - 1}      = 0x{self.x:x} ({n},{n - 1}) = {float(Fraction(self.x, 1 << (n - 1)))!r}",
            f"oracle      = 0x{self.expected:x} ({n},{n - 1 if self.x == 1 << (n - 1) else n})",
            f"ulp_err     = {self.ulp_err}",
            f"Y_{n}_{n}      = 0x{self.approx:x} ({n},{n})",
        ]
        if self.skipped:
            lines.append("approximation leaves the binade; case skipped")
            lines.append("skip")
            return "\n".join(lines)
        if self.error:
            lines.append(f"rejected: {self.error}")
            lines.append("FAIL")
            return "\n".join(lines)
        t = self.trace
        if t.shortcut:
            lines.append("x == 1 shortcut")
        else:
            if t.clamped:
                lines.append(f"Y clamped to 0x{t.Y.bits:x}")
            lines += [
                f"R           = {t.R}",
                f"R_op        = {t.R_op}",
                f"Y_op        = {t.Y_op}",
                f"C           = {t.C}",
                f"B           = {t.B}",
                f"2R          = {t.two_R}",
                f"2R < B      = {t.took_low}",
                f"Y+C         = {t.low}",
                f"Y+C+1       = {t.high}",
            ]
        lines.append(f"result      = {t.result}")
        lines.append("pass" if self.passed else "FAIL")
        return "\n".join(lines)


def individual_case(x_bits: int, ulp_err: int, variant: CorrectionConfig = VARIANT_5X4R,
                    n: int = 24) -> CaseReport:
    """Trace one input with the oracle result offset by ``ulp_err`` ulps."""
    one = 1 << (n - 1)
    if not one <= x_bits < 2 * one:
        raise ValueError(f"x=0x{x_bits:x} is not an {n}-bit significand in [1, 2)")
    X = Fixed(x_bits, n, n - 1)
    if x_bits == one:
        expected = one
        approx = one + ulp_err
        trace = trace_recip_fixed(X, Fixed(one, n, n), variant)
        return CaseReport(x_bits, ulp_err, n, expected, approx, trace)
    expected = oracle.recip_significand(x_bits, n)
    approx = expected + ulp_err
    report = CaseReport(x_bits, ulp_err, n, expected, approx)
    if not one <= approx < 2 * one:
        report.skipped = True
        return report
    try:
        report.trace = trace_recip_fixed(X, Fixed(approx, n, n), variant)
    except CorrectionError as exc:
        report.error = str(exc)
    return report


def host_float_crosscheck(operation: Operation = Operation.RECIP) -> int:
    """Count single-precision inputs where numpy float32 disagrees with the exact oracle."""
    n = 24
    one = 1 << 23
    mismatches = 0
    for start in range(one, 2 * one, CHUNK):
        x = np.arange(start, min(start + CHUNK, 2 * one), dtype=np.int64)
        xf = (x.astype(np.float64) / one).astype(np.float32)
        if operation is Operation.RECIP:
            x = x[x > one]
            xf = xf[1:] if start == one else xf
            want, _ = oracle.recip_bulk(x, n)
            got = (np.float32(1) / xf).astype(np.float64) * (1 << 24)
            mismatches += int((got.astype(np.int64) != want.astype(np.int64)).sum())
        elif operation is Operation.SQRT:
            for scale in (1, 2):
                want, _ = oracle.sqrt_bulk(x, scale, n)
                got = np.sqrt(xf * np.float32(scale)).astype(np.float64) * one
                mismatches += int((got.astype(np.int64) != want.astype(np.int64)).sum())
        else:
            raise ValueError("host cross-check covers recip and sqrt")
    return mismatches
