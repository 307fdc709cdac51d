"""Distinguishing bipartite pure states by LOCC while keeping Schmidt rank."""
from .numerics import DEFAULT_TOL, InvalidInputError, Tolerance
from .states import BipartiteState, StateSet

__all__ = ["DEFAULT_TOL", "InvalidInputError", "Tolerance", "BipartiteState", "StateSet"]
__version__ = "0.1.0"
