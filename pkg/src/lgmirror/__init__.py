"""Exact-arithmetic Landau-Ginzburg state spaces for Borcea-Voisin-type models."""

__version__ = "0.1.0"
