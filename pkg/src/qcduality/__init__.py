"""Quantum-classical duality between twisted inhomogeneous XXX chains and
rational mKP / Ruijsenaars-Schneider systems, with exact verification tools."""

__version__ = "0.1.0"
