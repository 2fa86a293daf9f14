"""Semiclassical light / metastable helium-3 spin dynamics."""

__version__ = "0.1.0"
