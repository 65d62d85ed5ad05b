"""Exact simultaneous rational approximations to zeta(2) and zeta(3)."""

__version__ = "0.1.0"
