"""Finder and verifier for planar central and balanced configurations of
the equal-mass n-body problem."""

from .nbody import Problem

__all__ = ["Problem"]
__version__ = "0.1.0"
