"""Hadamard coefficients from Green's operators on Minkowski space."""
__version__ = "0.1.0"
