"""Minimal resolutions, May E1 scans and long-exact-sequence bookkeeping for Ext over the odd-primary Steenrod algebra."""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
