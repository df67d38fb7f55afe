"""Compiler and verifier suite for gravity sliding-block puzzles.

Subpackages model the puzzle engine, constraint-logic graphs, visibility
layouts, the gadget library with its conformance checker, the reduction
compiler, exhaustive solvers for both sides, and the command-line tools.
"""

from .engine import (
    Block,
    Flower,
    Level,
    Slide,
    Swap,
    IllegalMove,
    apply_move,
    is_solved,
    legal_moves,
    mirror,
    settle,
    resolve_blooms,
    validate_level,
)

__all__ = [
    "Block",
    "Flower",
    "Level",
    "Slide",
    "Swap",
    "IllegalMove",
    "apply_move",
    "is_solved",
    "legal_moves",
    "mirror",
    "settle",
    "resolve_blooms",
    "validate_level",
]
