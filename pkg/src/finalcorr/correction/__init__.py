"""Final correction kernels for reciprocal, division and square root."""

from .config import (
    DIV_DEFAULT, SQRT_DEFAULT, VARIANT_4X3, VARIANT_5X3R, VARIANT_5X4R, VARIANTS,
    CorrectionConfig, CorrectionError, ErrorBoundExceeded, KernelStatus, PreconditionError,
    TableCorrectionConfig, get_variant,
)
from .divsqrt import (
    TableTrace, correct_div_fixed, correct_division, correct_sqrt_fixed, correct_square_root,
    trace_div_fixed, trace_sqrt_fixed,
)
from .recip import (
    RecipTrace, ResidualState, compute_residual_recip, correct_recip_fixed, correct_recip_general,
    correct_reciprocal, correct_reciprocal_general, general_error_budget, to_underestimate,
    trace_recip_fixed,
)

__all__ = [
    "CorrectionConfig", "TableCorrectionConfig", "CorrectionError", "PreconditionError",
    "ErrorBoundExceeded", "KernelStatus", "VARIANT_4X3", "VARIANT_5X3R", "VARIANT_5X4R",
    "VARIANTS", "DIV_DEFAULT", "SQRT_DEFAULT", "get_variant",
    "ResidualState", "RecipTrace", "TableTrace",
    "compute_residual_recip", "correct_recip_fixed", "trace_recip_fixed", "correct_recip_general",
    "general_error_budget", "to_underestimate", "correct_reciprocal", "correct_reciprocal_general",
    "correct_div_fixed", "trace_div_fixed", "correct_sqrt_fixed", "trace_sqrt_fixed",
    "correct_division", "correct_square_root",
]
