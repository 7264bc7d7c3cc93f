"""Exact engine for the central limit theorem of tensor products of free variables."""

__version__ = "0.1.0"
