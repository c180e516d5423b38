"""Ownership-typed references, their store-passing translation, and the
undecidability encodings for extended finitary PCF."""

__version__ = "0.1.0"
