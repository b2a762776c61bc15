"""Finite-window computations for coarse geometry and l^p uniform Roe algebras."""

__version__ = "0.1.0"
