"""Capacity regions of the semi-arbitrarily-varying broadcast channel."""

__version__ = "0.1.0"
