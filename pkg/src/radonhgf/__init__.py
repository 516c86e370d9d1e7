"""Exact and numeric verification of contiguity relations for matrix hypergeometric integrands."""
from radonhgf.kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
