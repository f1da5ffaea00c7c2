"""Quantum-circuit emulation of muon spin polarisation functions."""

__version__ = "0.1.0"
