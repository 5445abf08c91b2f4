"""Synthetic node classification tasks with controlled feature/structure interplay."""

__version__ = "0.1.0"
