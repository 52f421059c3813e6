"""Mechanical-qubit and mechanical-cat-qubit quantum gravimetry."""

__version__ = "0.1.0"
