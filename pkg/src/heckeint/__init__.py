"""Exact Hecke operators on Fourier coefficients of Siegel modular forms,
with integrality certificates and the ideal-indexed Hilbert recursion."""

__version__ = "0.1.0"
