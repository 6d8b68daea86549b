"""Numerics for BPS monopoles in flat and curved space and for fermions in their field."""

__version__ = "0.1.0"
