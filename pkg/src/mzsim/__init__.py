"""Mach-Zehnder trial simulation: pure states, coin encryption and phase-noise mixtures."""

__version__ = "0.1.0"
