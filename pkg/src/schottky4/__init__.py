"""Genus-4 Schottky form: lattice theta differences, theta-constant relations,
hyperelliptic period matrices and divisor-class arithmetic."""

__version__ = "0.1.0"
