"""Final correction of division and square-root underestimates.

Both kernels follow the reciprocal datapath: an exact residual at double
width, a leading-bit estimate of the correction C, and one strict comparison
against the branch point separating C from C + 1. The estimate divides by the
divisor (or twice the root) through a small reciprocal table.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..formats import FpFormat, Fixed, decode, encode, fixed_mul
from ..theory import quotient_exponent
from .config import DIV_DEFAULT, PreconditionError, SQRT_DEFAULT, TableCorrectionConfig


@dataclass(frozen=True)
class TableTrace:
    result: Fixed
    R: int | None = None
    C: int | None = None
    branch_lhs: int | None = None
    branch_rhs: int | None = None
    shortcut: bool = False

    @property
    def equality(self) -> bool:
        return self.branch_lhs is not None and self.branch_lhs == self.branch_rhs


def _estimate(r: int, r_shift: int, index_src: int, n: int, config: TableCorrectionConfig) -> int:
    t = config.table_index_bits
    r_op = r >> r_shift
    if r_op >= 1 << config.residual_leading_bits:
        raise PreconditionError("residual operand fits", R=r)
    return (r_op * config.lookup(index_src >> (n - t))) >> config.table_shift


def trace_div_fixed(A: Fixed, B: Fixed, Q: Fixed, config: TableCorrectionConfig = DIV_DEFAULT) -> TableTrace:
    n = A.total_p
    if (A.frac_f, B.total_p, B.frac_f, Q.total_p) != (n - 1, n, n - 1, n):
        raise ValueError(f"expected A,B ({n},{n - 1}) and Q ({n},f), got {A.label} {B.label} {Q.label}")
    one = 1 << (n - 1)
    for name, v in (("A", A), ("B", B)):
        if not one <= v.bits < 2 * one:
            raise ValueError(f"{name}={v} outside [1, 2)")
    f = n - 1 if A.bits >= B.bits else n
    if Q.frac_f != f:
        raise ValueError(f"quotient estimate must have {f} fraction bits, got {Q.label}")

    if A.bits == B.bits:
        return TableTrace(Fixed(one, n, n - 1), shortcut=True)
    if B.bits == one:
        return TableTrace(Fixed(A.bits, n, n - 1), shortcut=True)

    q = min(max(Q.bits, one), 2 * one - 1)
    numerator = Fixed(A.bits << f, n + f, n - 1 + f)
    product = fixed_mul(B, Fixed(q, n, f))
    r = numerator.bits - product.bits
    if r < 0:
        raise PreconditionError("R >= 0", A=A.bits, B=B.bits, Q=q)
    if r >= 1 << (n + 3):
        raise PreconditionError("R < 2**(n+3)", A=A.bits, B=B.bits, Q=q, R=r)
    c = _estimate(r, config.residual_shift(n), B.bits, n, config)
    if c >= config.c_limit:
        raise PreconditionError(f"C < {config.c_limit}", A=A.bits, B=B.bits, Q=q, C=c)
    lhs, rhs = 2 * r, (2 * c + 1) * B.bits
    result = q + c if lhs < rhs else q + c + 1
    return TableTrace(Fixed(result, n, f), R=r, C=c, branch_lhs=lhs, branch_rhs=rhs)


def correct_div_fixed(A: Fixed, B: Fixed, Q: Fixed, config: TableCorrectionConfig = DIV_DEFAULT) -> Fixed:
    """Nearest-even A/B from an underestimate Q in the quotient's binade.

    A and B are (n, n-1) significands in [1, 2). Q has n-1 fraction bits when
    A >= B (quotient in [1, 2)) and n otherwise (quotient in [0.5, 1)).
    """
    return trace_div_fixed(A, B, Q, config).result


def trace_sqrt_fixed(X: Fixed, Y: Fixed, config: TableCorrectionConfig = SQRT_DEFAULT) -> TableTrace:
    n = Y.total_p
    if (X.total_p, X.frac_f, Y.frac_f) != (n + 1, n - 1, n - 1):
        raise ValueError(f"expected X ({n + 1},{n - 1}) and Y ({n},{n - 1}), got {X.label} {Y.label}")
    one = 1 << (n - 1)
    if not one <= X.bits < 4 * one:
        raise ValueError(f"X={X} outside [1, 4)")
    if X.bits >= 2 * one and X.bits & 1:
        raise ValueError(f"X={X} is not representable in the binade [2, 4)")
    if X.bits == one:
        return TableTrace(Fixed(one, n, n - 1), shortcut=True)

    y = min(max(Y.bits, one), 2 * one - 1)
    radicand = X.bits << (n - 1)
    r = radicand - y * y  # units of ulp**2
    if r < 0:
        raise PreconditionError("R >= 0", X=X.bits, Y=y)
    if r >= 1 << (n + 4):
        raise PreconditionError("R < 2**(n+4)", X=X.bits, Y=y, R=r)
    c = _estimate(r, config.residual_shift(n, sqrt=True), y, n, config)
    if c >= config.c_limit:
        raise PreconditionError(f"C < {config.c_limit}", X=X.bits, Y=y, C=c)
    # sqrt(x) < y + (c + 1/2) ulp  <=>  4r < 4 (2c+1) y + (2c+1)**2
    k = 2 * c + 1
    lhs, rhs = 4 * r, 4 * k * y + k * k
    result = y + c if lhs < rhs else y + c + 1
    return TableTrace(Fixed(result, n, n - 1), R=r, C=c, branch_lhs=lhs, branch_rhs=rhs)


def correct_sqrt_fixed(X: Fixed, Y: Fixed, config: TableCorrectionConfig = SQRT_DEFAULT) -> Fixed:
    """Nearest-even sqrt(X) from an underestimate Y.

    X is an (n+1, n-1) value in [1, 4) holding an n-bit significand of either
    binade; Y is an (n, n-1) root estimate in [1, 2).
    """
    return trace_sqrt_fixed(X, Y, config).result


def _project(fmt: FpFormat, bits: int, e_out: int) -> int:
    d = decode(fmt, bits)
    if d.exponent < e_out:
        return fmt.one
    if d.exponent > e_out:
        return 2 * fmt.one - 1
    return d.significand


def correct_division(fmt: FpFormat, a_bits: int, b_bits: int, q_bits: int,
                     config: TableCorrectionConfig = DIV_DEFAULT) -> int:
    """Encoding-level nearest-even quotient from an underestimate in the target format."""
    n = fmt.precision_n
    a, b = decode(fmt, a_bits), decode(fmt, b_bits)
    e_out = quotient_exponent(a.exponent, b.exponent, a.significand, b.significand)
    f = n - 1 if a.significand >= b.significand else n
    q = _project(fmt, q_bits, e_out)
    out = correct_div_fixed(Fixed(a.significand, n, n - 1), Fixed(b.significand, n, n - 1),
                            Fixed(q, n, f), config)
    return encode(fmt, a.sign ^ b.sign, e_out, out.bits)


def correct_square_root(fmt: FpFormat, x_bits: int, y_bits: int,
                        config: TableCorrectionConfig = SQRT_DEFAULT) -> int:
    """Encoding-level nearest-even square root of a positive normal number."""
    n = fmt.precision_n
    x = decode(fmt, x_bits)
    if x.sign:
        raise ValueError("square root of a negative number")
    scale = 1 + (x.exponent & 1)
    e_out = (x.exponent - (scale - 1)) // 2
    y = _project(fmt, y_bits, e_out)
    out = correct_sqrt_fixed(Fixed(scale * x.significand, n + 1, n - 1), Fixed(y, n, n - 1), config)
    return encode(fmt, 0, e_out, out.bits)
