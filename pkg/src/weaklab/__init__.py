"""Weak quantum measurement simulations.

Gaussian-pointer von Neumann coupling, weak values, partial collapse, and the
interferometer, spin and well experiments built from them.
"""
from . import hilbert, pointer, statkit, tsvf
from .scenarios import SCENARIOS

__version__ = "0.1.0"
