"""Dirichlet spectra of surfaces of revolution and the disc comparison."""

__version__ = "0.1.0"
