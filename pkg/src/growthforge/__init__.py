"""Exact growth computations for decorated Grigorchuk groups."""

__version__ = "0.1.0"
