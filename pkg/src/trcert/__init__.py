"""Exact certificates for totally real algebraic integers, unit identities and JR censuses."""

__version__ = "0.1.0"
