"""Sum-of-squares lower-bound certificates for planted clique, built and checked numerically."""
from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["__version__"]
