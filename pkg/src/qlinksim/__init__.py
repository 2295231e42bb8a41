"""Density-matrix simulator for optically heralded entanglement between
superconducting bosonic modules linked by fiber."""

__version__ = "0.1.0"
