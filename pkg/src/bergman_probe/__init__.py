"""Bergman kernel and metric estimates on low-dimensional convex domains."""

__version__ = "0.1.0"
