"""Exact-arithmetic toolkit for LQF stability regions of interference graphs."""

from .exactla import Q, rational, rational_str
from .graph import InterferenceGraph
from .oracles import RateVector

__version__ = "0.1.0"

__all__ = ["Q", "rational", "rational_str", "InterferenceGraph", "RateVector"]
