"""Twisted Bruhat orders, totally nonnegative cells and their checks."""

__version__ = "0.1.0"
