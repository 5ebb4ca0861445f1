"""Derivative-free optimisation with dynamically shaped Gaussian smoothing windows."""

__version__ = "0.1.0"
