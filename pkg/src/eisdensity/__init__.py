"""Eisenstein polynomial densities over holomorphy rings of rational function fields."""

__version__ = "0.1.0"
