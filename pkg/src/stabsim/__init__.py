"""Stabilizer projector simulation of quantum circuits."""

__version__ = "0.1.0"
