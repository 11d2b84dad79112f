"""Cycling risk surface estimation and risk/comfort-balanced route recommendations."""

__version__ = "0.1.0"
