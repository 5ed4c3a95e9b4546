"""Symbolic and numerical verification of massless-particle symmetry terns."""

__version__ = "0.1.0"
