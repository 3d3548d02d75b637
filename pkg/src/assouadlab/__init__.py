"""assouadlab: exact and empirical dimension analysis for random
self-similar sets, random carpets and fractal percolation."""

from ._core import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
