"""Final correction of reciprocal approximations.

``correct_recip_fixed`` is the unsigned fixed-point datapath for
underestimates; ``correct_recip_general`` accepts errors of either sign and any
rounding mode and works on unbounded integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..formats import FpFormat, Fixed, RoundingMode, decode, encode, fixed_mul, fixed_sub
from ..theory import reciprocal_exponent
from .config import CorrectionConfig, ErrorBoundExceeded, PreconditionError, VARIANT_5X4R


@dataclass(frozen=True)
class ResidualState:
    R: Fixed
    C: Fixed
    B: Fixed


@dataclass(frozen=True)
class RecipTrace:
    """Every intermediate of one pass through the fixed-point datapath."""

    X: Fixed
    Y_in: Fixed
    Y: Fixed
    result: Fixed
    shortcut: bool = False
    clamped: bool = False
    R: Fixed | None = None
    R_op: Fixed | None = None
    Y_op: Fixed | None = None
    C: Fixed | None = None
    B: Fixed | None = None
    two_R: Fixed | None = None
    low: Fixed | None = None
    high: Fixed | None = None
    took_low: bool | None = None

    @property
    def state(self) -> ResidualState | None:
        if self.R is None:
            return None
        return ResidualState(self.R, self.C, self.B)

    @property
    def equality(self) -> bool:
        """True if 2R == B, the case the datapath never tests for."""
        return self.two_R is not None and self.two_R.bits == self.B.bits


def _precision(X: Fixed, Y: Fixed) -> int:
    n = X.total_p
    if X.frac_f != n - 1 or Y.total_p != n or Y.frac_f != n:
        raise ValueError(f"expected X({n},{n - 1}) and Y({n},{n}), got X{X.label} Y{Y.label}")
    if not 1 << (n - 1) <= X.bits < 1 << n:
        raise ValueError(f"X={X} outside [1, 2)")
    return n


def compute_residual_recip(X: Fixed, Y: Fixed) -> Fixed:
    """Exact ``1 - X*Y`` in (2n, 2n-1) form; raises if the product exceeds one."""
    n = X.total_p
    one = Fixed(1 << (2 * n - 1), 2 * n, 2 * n - 1)
    product = fixed_mul(X, Y)
    if product.bits > one.bits:
        raise PreconditionError("R >= 0", X=X.bits, Y=Y.bits)
    return fixed_sub(one, product)


def trace_recip_fixed(X: Fixed, Y: Fixed, config: CorrectionConfig = VARIANT_5X4R) -> RecipTrace:
    n = _precision(X, Y)
    one = 1 << (n - 1)
    if X.bits == one:
        # 1/1 == 1, returned with X's binary point
        return RecipTrace(X, Y, Y, Fixed(one, n, n - 1), shortcut=True)

    Y_in = Y
    # HALF(n,n) shares its bit pattern with ONE(n,n-1)
    clamped = Y.bits < one
    if clamped:
        Y = Fixed(one, n, n)

    R_full = compute_residual_recip(X, Y)
    if R_full.bits >= 1 << (n + 3):
        raise PreconditionError("R < 2**(n+3)", X=X.bits, Y=Y.bits, R=R_full.bits)
    R = R_full.narrow(n + 3)

    r_shift = config.residual_shift(n)
    R_op = R.slice(n + 2, r_shift)
    Y_op = Y.slice(n - 1, config.approx_shift(n))
    c = (fixed_mul(R_op, Y_op).bits + config.addend) >> config.shift_after_mul
    if c >= config.c_limit:
        raise PreconditionError(f"C < {config.c_limit}", X=X.bits, Y=Y.bits, C=c)
    C = Fixed(c, max(config.c_bits, 1), n)

    B = fixed_mul(Fixed(2 * c + 1, config.c_bits + 1, n), X)
    two_R = Fixed(2 * R.bits, n + 4, 2 * n - 1)
    low = Fixed(Y.bits + c, n, n)
    high = Fixed(Y.bits + c + 1, n, n)
    took_low = two_R.bits < B.bits
    return RecipTrace(X, Y_in, Y, low if took_low else high, clamped=clamped, R=R, R_op=R_op,
                      Y_op=Y_op, C=C, B=B, two_R=two_R, low=low, high=high, took_low=took_low)


def correct_recip_fixed(X: Fixed, Y: Fixed, config: CorrectionConfig = VARIANT_5X4R) -> Fixed:
    """Correctly rounded (nearest-even) 1/X from an underestimate Y.

    X is (n, n-1) in [1, 2); Y is (n, n) in [0.5, 1). The result is (n, n),
    except for X == 1 which returns one in X's (n, n-1) form.
    """
    return trace_recip_fixed(X, Y, config).result


def to_underestimate(approx_sig: int, max_positive_error: int) -> int:
    """Shift a signed-error estimate so that it can only underestimate."""
    if max_positive_error < 0:
        raise ValueError("max_positive_error must be non-negative")
    return approx_sig - max_positive_error


# Estimate of the correction from leading bits: residual >> (n - 4) times the
# top 7 bits of the approximation, so one ulp of result is 2**10 product units.
_GENERAL_R_DROP = 4
_GENERAL_Y_BITS = 7
_GENERAL_SHIFT = 10


def general_error_budget(n: int, error_bound_ulps: int) -> Fraction:
    """Worst-case error, in ulps, of the leading-bit correction estimate.

    Must stay below one half for the two-candidate selection to be valid.
    """
    b1 = error_bound_ulps + 1
    return (Fraction(1, 8) + Fraction(b1, 1 << (_GENERAL_Y_BITS - 1))
            + Fraction(b1 * b1, 1 << (n - 1)))


_BRANCH_OFFSET = {
    RoundingMode.NEAREST_EVEN: 1,
    RoundingMode.TOWARD_ZERO: 2,
    RoundingMode.TOWARD_NEG_INF: 2,
    RoundingMode.TOWARD_POS_INF: 0,
}


def _mode_addend(mode: RoundingMode) -> int:
    half = 1 << (_GENERAL_SHIFT - 1)
    return {1: 0, 2: -half, 0: half}[_BRANCH_OFFSET[mode]]


def correct_recip_general(x_sig: int, approx_sig: int, error_bound_ulps: int,
                          mode: RoundingMode = RoundingMode.NEAREST_EVEN, n: int = 24) -> int:
    """Correct a signed-error reciprocal significand under any rounding mode.

    ``x_sig`` is an n-bit significand of x in [1, 2); ``approx_sig`` has place
    value 2**-n (so 1/x for x > 1 lies in (0.5, 1)). Returns the rounded
    significand with the same place value, or ``1 << (n-1)`` at place value
    2**-(n-1) for x == 1.
    """
    one = 1 << (n - 1)
    if not one <= x_sig < 2 * one:
        raise ValueError(f"x_sig {x_sig:#x} is not an {n}-bit significand")
    if x_sig == one:
        return one
    if general_error_budget(n, error_bound_ulps) >= Fraction(1, 2):
        raise ValueError(f"error bound {error_bound_ulps} too large for precision {n}")

    y = min(max(approx_sig, one), 2 * one - 1)  # project into the output binade
    r = (1 << (2 * n - 1)) - x_sig * y  # signed residual; one ulp of error ~ x_sig
    offset = _BRANCH_OFFSET[mode]
    outer = (2 * error_bound_ulps + 1) if offset == 1 else (2 * error_bound_ulps + 2)
    if 2 * abs(r) >= outer * x_sig:
        raise ErrorBoundExceeded("|residual| inside outermost interval",
                                 x=x_sig, approx=approx_sig, bound=error_bound_ulps)

    r_op = r >> (n - _GENERAL_R_DROP)
    y_op = y >> (n - _GENERAL_Y_BITS)
    c = (r_op * y_op + _mode_addend(mode)) >> _GENERAL_SHIFT
    branch_point = (2 * c + offset) * x_sig
    return y + c if 2 * r < branch_point else y + c + 1


def correct_reciprocal(fmt: FpFormat, x_bits: int, approx_bits: int,
                       config: CorrectionConfig = VARIANT_5X4R) -> int:
    """Encoding-level nearest-even reciprocal from an underestimate in the target format."""
    n = fmt.precision_n
    x = decode(fmt, x_bits)
    if x.significand == fmt.one:
        return encode(fmt, x.sign, reciprocal_exponent(x.exponent, True), fmt.one)
    e_out = reciprocal_exponent(x.exponent, False)
    a = decode(fmt, approx_bits)
    if a.exponent < e_out:
        y = fmt.one
    elif a.exponent > e_out:
        y = 2 * fmt.one - 1
    else:
        y = a.significand
    result = correct_recip_fixed(Fixed(x.significand, n, n - 1), Fixed(y, n, n), config)
    return encode(fmt, x.sign, e_out, result.bits)


def correct_reciprocal_general(fmt: FpFormat, x_bits: int, approx_bits: int, error_bound_ulps: int,
                               mode: RoundingMode = RoundingMode.NEAREST_EVEN) -> int:
    """Encoding-level reciprocal in any mode from a signed-error estimate."""
    x = decode(fmt, x_bits)
    if x.significand == fmt.one:
        return encode(fmt, x.sign, reciprocal_exponent(x.exponent, True), fmt.one)
    if x.sign and mode in (RoundingMode.TOWARD_POS_INF, RoundingMode.TOWARD_NEG_INF):
        # magnitude rounding direction flips for negative results
        mode = (RoundingMode.TOWARD_NEG_INF if mode is RoundingMode.TOWARD_POS_INF
                else RoundingMode.TOWARD_POS_INF)
    e_out = reciprocal_exponent(x.exponent, False)
    a = decode(fmt, approx_bits)
    if a.exponent < e_out:
        y = fmt.one
    elif a.exponent > e_out:
        y = 2 * fmt.one - 1
    else:
        y = a.significand
    sig = correct_recip_general(x.significand, y, error_bound_ulps, mode, fmt.precision_n)
    return encode(fmt, x.sign, e_out, sig)
