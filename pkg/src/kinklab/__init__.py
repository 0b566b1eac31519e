"""Numerical laboratory for moving sine-Gordon kinks."""

__version__ = "0.1.0"
