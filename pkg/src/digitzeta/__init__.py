"""Generalized numeration systems: counts, densities and zeta functions."""
