"""Characteristic fans, richness and Riccati blow-up for quasi-linear systems."""

__version__ = "0.1.0"
