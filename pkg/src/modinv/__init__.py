"""Exact modular data and modular-invariant classification toolkit."""

__version__ = "0.1.0"
