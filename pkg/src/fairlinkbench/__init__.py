"""Benchmarking toolkit for structural bias and fairness in graph link prediction."""

__version__ = "0.1.0"
