"""Exact computations for mixed-spin-P-field genus-zero data and R-matrices."""

__version__ = "0.1.0"
