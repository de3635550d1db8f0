"""Selective-disclosure verifiable credentials."""

__version__ = "0.1.0"
