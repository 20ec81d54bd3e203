"""Robust connection games on temporal graphs."""

__version__ = "0.1.0"
