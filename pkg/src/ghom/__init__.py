"""Quantum Fisher information toolkit for generalized Hong-Ou-Mandel interferometers."""

__version__ = "0.1.0"
