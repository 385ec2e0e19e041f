"""Lie point symmetries, reductions and hidden symmetries of the heat
equation on Riemannian charts."""

__version__ = "0.1.0"
