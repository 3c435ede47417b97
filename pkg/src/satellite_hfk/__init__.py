"""Knot Floer complexes of twisted satellites with (1,1)-unknot patterns."""

__version__ = "0.1.0"
