"""Correctly rounded reciprocal, division and square root by final correction.

Exact oracles, midpoint-impossibility scans, bit-exact correction kernels and an
exhaustive verification harness.
"""

__version__ = "0.1.0"
