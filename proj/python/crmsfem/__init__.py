"""Multiscale Stokes solver on penalized Cartesian grids."""

from ._core import msfem, obstacles, reference, sweep

__all__ = ["msfem", "obstacles", "reference", "sweep"]
