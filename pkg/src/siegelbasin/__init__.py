"""Numerical toolkit for Siegel-disk linearization and certified
perturbation bounds on immediate basins of attraction."""

__version__ = "0.1.0"
