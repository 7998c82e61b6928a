"""LR drawings of binary trees: construction, exact widths, lower-bound trees."""

__version__ = "0.1.0"
