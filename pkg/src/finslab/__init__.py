"""Numerical laboratory for Taub-NUT metrics, their Killing fields and Einstein Randers metrics."""

__version__ = "0.1.0"
