"""Pseudospectral solver and verification tools for the fifth-order KP-II equation on a half-plane."""
__version__ = "0.1.0"
