"""Cech descent, fundamental groupoids of covers, and torsors on finite models."""

__version__ = "0.1.0"
