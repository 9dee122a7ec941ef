"""Zelevinsky-Aubert duality for p-adic Sp(2n) and SO(2n+1)."""

__version__ = "1.0.0"
