"""Vectorised forms of the correction kernels for exhaustive sweeps.

Each function mirrors its scalar counterpart bit for bit but reports
precondition failures per element through :class:`KernelStatus` codes instead
of raising. All arithmetic is int64, so precision is limited to 24 bits.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..formats import RoundingMode
from .config import CorrectionConfig, KernelStatus, TableCorrectionConfig
from .recip import (_BRANCH_OFFSET, _GENERAL_R_DROP, _GENERAL_SHIFT, _GENERAL_Y_BITS,
                    _mode_addend, general_error_budget)

MAX_BATCH_PRECISION = 24


class BatchResult(NamedTuple):
    result: np.ndarray  # significands; 0 where status != OK
    status: np.ndarray  # KernelStatus codes
    equality: np.ndarray  # strict comparison met exact equality


def _check(n: int) -> None:
    if not 8 <= n <= MAX_BATCH_PRECISION:
        raise ValueError(f"batch kernels support 8 <= n <= {MAX_BATCH_PRECISION}, got {n}")


def _i64(a) -> np.ndarray:
    return np.asarray(a, dtype=np.int64)


def _flag(status, mask, code) -> None:
    status[(status == KernelStatus.OK) & mask] = code


def _finish(status, take_low, low, lhs, rhs) -> BatchResult:
    ok = status == KernelStatus.OK
    result = np.where(ok, np.where(take_low, low, low + 1), 0)
    return BatchResult(result, status, ok & (lhs == rhs))


def recip_fixed_batch(X, Y, config: CorrectionConfig, n: int = 24) -> BatchResult:
    _check(n)
    X, Y = np.broadcast_arrays(_i64(X), _i64(Y))
    one = 1 << (n - 1)
    Y = np.maximum(Y, one)
    R = (1 << (2 * n - 1)) - X * Y
    status = np.zeros(X.shape, dtype=np.int8)
    _flag(status, R < 0, KernelStatus.RESIDUAL_NEGATIVE)
    _flag(status, R >= 1 << (n + 3), KernelStatus.RESIDUAL_TOO_WIDE)
    Rc = np.where(status == KernelStatus.OK, R, 0)
    C = ((Rc >> config.residual_shift(n)) * (Y >> config.approx_shift(n)) + config.addend) >> config.shift_after_mul
    _flag(status, C >= config.c_limit, KernelStatus.CORRECTION_TOO_WIDE)
    lhs, rhs = 2 * Rc, (2 * C + 1) * X
    out = _finish(status, lhs < rhs, Y + C, lhs, rhs)
    shortcut = X == one
    return BatchResult(np.where(shortcut, one, out.result),
                       np.where(shortcut, KernelStatus.OK, out.status).astype(np.int8),
                       out.equality & ~shortcut)


def recip_general_batch(X, Y, error_bound_ulps: int, mode: RoundingMode = RoundingMode.NEAREST_EVEN,
                        n: int = 24) -> BatchResult:
    _check(n)
    if general_error_budget(n, error_bound_ulps) >= 0.5:
        raise ValueError(f"error bound {error_bound_ulps} too large for precision {n}")
    X, Y = np.broadcast_arrays(_i64(X), _i64(Y))
    one = 1 << (n - 1)
    Y = np.clip(Y, one, 2 * one - 1)
    R = (1 << (2 * n - 1)) - X * Y
    offset = _BRANCH_OFFSET[mode]
    outer = (2 * error_bound_ulps + 1) if offset == 1 else (2 * error_bound_ulps + 2)
    status = np.zeros(X.shape, dtype=np.int8)
    _flag(status, 2 * np.abs(R) >= outer * X, KernelStatus.BOUND_EXCEEDED)
    C = ((R >> (n - _GENERAL_R_DROP)) * (Y >> (n - _GENERAL_Y_BITS)) + _mode_addend(mode)) >> _GENERAL_SHIFT
    lhs, rhs = 2 * R, (2 * C + offset) * X
    out = _finish(status, lhs < rhs, Y + C, lhs, rhs)
    shortcut = X == one
    return BatchResult(np.where(shortcut, one, out.result),
                       np.where(shortcut, KernelStatus.OK, out.status).astype(np.int8),
                       out.equality & ~shortcut)


def _table_estimate(R, r_shift, index_src, n, config: TableCorrectionConfig, status):
    t = config.table_index_bits
    table = np.asarray(config.table, dtype=np.int64)
    r_op = R >> r_shift
    _flag(status, r_op >= 1 << config.residual_leading_bits, KernelStatus.RESIDUAL_TOO_WIDE)
    C = (r_op * table[(index_src >> (n - t)) - (1 << (t - 1))]) >> config.table_shift
    _flag(status, C >= config.c_limit, KernelStatus.CORRECTION_TOO_WIDE)
    return C


def div_batch(A, B, Q, config: TableCorrectionConfig, n: int = 24) -> BatchResult:
    """Quotient estimates Q must carry n-1 fraction bits where A >= B and n elsewhere."""
    _check(n)
    A, B, Q = np.broadcast_arrays(_i64(A), _i64(B), _i64(Q))
    one = 1 << (n - 1)
    f = np.where(A >= B, n - 1, n)
    Q = np.clip(Q, one, 2 * one - 1)
    R = (A << f) - B * Q
    status = np.zeros(A.shape, dtype=np.int8)
    _flag(status, R < 0, KernelStatus.RESIDUAL_NEGATIVE)
    _flag(status, R >= 1 << (n + 3), KernelStatus.RESIDUAL_TOO_WIDE)
    Rc = np.where(status == KernelStatus.OK, R, 0)
    C = _table_estimate(Rc, config.residual_shift(n), B, n, config, status)
    lhs, rhs = 2 * Rc, (2 * C + 1) * B
    out = _finish(status, lhs < rhs, Q + C, lhs, rhs)
    equal = A == B
    copy = (B == one) & ~equal
    result = np.where(equal, one, np.where(copy, A, out.result))
    special = equal | copy
    return BatchResult(result, np.where(special, KernelStatus.OK, out.status).astype(np.int8),
                       out.equality & ~special)


def sqrt_batch(X, scale, Y, config: TableCorrectionConfig, n: int = 24) -> BatchResult:
    """X holds n-bit significands, ``scale`` (1 or 2) selects the input binade."""
    _check(n)
    X, S, Y = np.broadcast_arrays(_i64(X), _i64(scale), _i64(Y))
    one = 1 << (n - 1)
    Y = np.clip(Y, one, 2 * one - 1)
    R = ((S * X) << (n - 1)) - Y * Y
    status = np.zeros(X.shape, dtype=np.int8)
    _flag(status, R < 0, KernelStatus.RESIDUAL_NEGATIVE)
    _flag(status, R >= 1 << (n + 4), KernelStatus.RESIDUAL_TOO_WIDE)
    Rc = np.where(status == KernelStatus.OK, R, 0)
    C = _table_estimate(Rc, config.residual_shift(n, sqrt=True), Y, n, config, status)
    k = 2 * C + 1
    lhs, rhs = 4 * Rc, 4 * k * Y + k * k
    out = _finish(status, lhs < rhs, Y + C, lhs, rhs)
    shortcut = (S * X) == one
    return BatchResult(np.where(shortcut, one, out.result),
                       np.where(shortcut, KernelStatus.OK, out.status).astype(np.int8),
                       out.equality & ~shortcut)
