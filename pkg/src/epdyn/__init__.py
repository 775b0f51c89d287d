"""Spectra, exceptional points and survival dynamics of an impurity (or a
pair of coupled impurities) attached to a semi-infinite tight-binding chain."""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
