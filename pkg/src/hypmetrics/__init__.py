"""Quasi-hyperbolic and Kobayashi distances on planar domains."""

__version__ = "0.1.0"
