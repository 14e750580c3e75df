"""Exact computation of p-adic L-invariant polynomials and their slopes."""

__version__ = "0.1.0"
