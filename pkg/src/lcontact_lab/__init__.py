"""Numerical checks for split-quaternionic and L-contact structures on unit tangent bundles."""

__version__ = "0.1.0"
