"""Capacity planning and regulation compliance for sub-GHz LPWAN deployments."""

__version__ = "0.1.0"
