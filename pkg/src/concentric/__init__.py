"""Certify 4-HAT-stabilizers from tightly concentric 2-groups."""

__version__ = "0.1.0"
