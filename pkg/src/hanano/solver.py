"""Exhaustive reachability search over puzzle states.

States are deduplicated by a canonical key that treats identical movable
blocks (same shape, kind, color, arrow, bloom flag, attached flowers) as
interchangeable, which the game semantics never distinguishes.
"""

from __future__ import annotations

import struct
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .engine import GameState, IllegalMove, Level, Move, Sim, validate_level

SOLVABLE = "solvable"
UNSOLVABLE = "unsolvable"
UNKNOWN = "unknown"


class InvalidLevel(Exception):
    pass


class IllegalMoveAt(Exception):
    def __init__(self, index: int, move):
        super().__init__(f"illegal move at index {index}: {move!r}")
        self.index = index
        self.move = move


@dataclass(frozen=True)
class SearchLimits:
    max_states: int = 2_000_000
    max_seconds: float = 120.0

    def __post_init__(self):
        if self.max_states <= 0 or self.max_seconds <= 0:
            raise ValueError("limits must be positive")


@dataclass
class SolveVerdict:
    status: str
    trace: Optional[list] = None
    stats: dict = field(default_factory=dict)

    @property
    def solvable(self):
        return self.status == SOLVABLE

    def to_dict(self):
        d = {"status": self.status, "stats": self.stats}
        if self.trace is not None:
            d["trace"] = [move_to_dict(m) for m in self.trace]
        return d


def move_to_dict(m) -> dict:
    from .engine import Slide, Swap

    if isinstance(m, Slide):
        return {"type": "slide", "block": m.block, "direction": m.direction}
    return {"type": "swap", "block_a": m.block_a, "block_b": m.block_b}


def move_from_dict(d) -> Move:
    from .engine import Slide, Swap

    if d["type"] == "slide":
        return Slide(d["block"], d["direction"])
    if d["type"] == "swap":
        return Swap(d["block_a"], d["block_b"])
    raise ValueError(f"unknown move type {d!r}")


def canonical_key(state: GameState) -> bytes:
    """Injective-up-to-equivalence packed encoding of a settled state."""
    sim = Sim(state)
    return pack_key(sim.key(sim.initial))


def pack_key(key_tuple) -> bytes:
    return struct.pack(f"<{3 * len(key_tuple)}h", *[v for entry in key_tuple for v in entry])


def solve(level: Level, limits: SearchLimits = SearchLimits(), strategy: str = "bfs") -> SolveVerdict:
    """Decide solvability by exhaustive search with deduplication.

    BFS yields a shortest-found witness; DFS trades trace quality for a
    chance to hit a witness before exhausting memory.  Either way a
    definitive "unsolvable" requires the dedup set to close under
    successors within the limits.
    """
    problems = validate_level(level)
    if problems:
        raise InvalidLevel("; ".join(problems))
    sim = Sim(level)
    start = sim.normalize(sim.initial)
    t0 = time.monotonic()

    k0 = sim.key(start)
    parents = {k0: None}  # key -> (parent_key, internal_move) | None
    if sim.is_solved(start):
        return SolveVerdict(SOLVABLE, trace=[], stats=_stats(1, 1, t0))

    frontier = deque([(start, k0)])
    pop = frontier.popleft if strategy == "bfs" else frontier.pop
    explored = 0
    peak = 1
    shapes = sim.shapes

    def bloom_count(st):
        return sum(1 for (sid, _x, _y) in st if shapes.bloomed[sid])

    def dfs_rank(entry):
        (mv, nxt) = entry
        blooms = bloom_count(nxt)
        kind, i, _arg = mv
        sid = nxt[i][0] if i < len(nxt) else 0
        colored = 1 if shapes.kind[sid] == "C" else 0
        return (blooms, colored)

    while frontier:
        if explored % 512 == 0 and time.monotonic() - t0 > limits.max_seconds:
            return SolveVerdict(UNKNOWN, stats=_stats(explored, peak, t0, len(parents)))
        state, key = pop()
        explored += 1
        expansion = sim.expand(state)
        if strategy == "dfs" and len(expansion) > 1:
            # highest-rank successors are pushed last, popped first
            expansion.sort(key=dfs_rank)
        succs = []
        for mv, nxt in expansion:
            nk = sim.key(nxt)
            if nk in parents:
                continue
            parents[nk] = (key, mv)
            if sim.is_solved(nxt):
                trace = _reconstruct(sim, parents, nk)
                return SolveVerdict(
                    SOLVABLE, trace=trace, stats=_stats(explored, peak, t0, len(parents))
                )
            succs.append((nxt, nk))
        frontier.extend(succs)
        if len(parents) > limits.max_states:
            return SolveVerdict(UNKNOWN, stats=_stats(explored, peak, t0, len(parents)))
        if len(frontier) > peak:
            peak = len(frontier)
    return SolveVerdict(UNSOLVABLE, stats=_stats(explored, peak, t0, len(parents)))


def _stats(explored, peak, t0, states=None):
    return {
        "states_explored": explored if states is None else states,
        "expanded": explored,
        "frontier_peak": peak,
        "elapsed": round(time.monotonic() - t0, 6),
    }


def _reconstruct(sim, parents, key):
    moves = []
    cur = parents[key]
    while cur is not None:
        pk, mv = cur
        moves.append(sim.move_to_public(mv))
        cur = parents[pk]
    moves.reverse()
    return moves


def replay(level: Level, trace) -> GameState:
    """Fold apply_move over the trace; raise IllegalMoveAt on a bad move."""
    problems = validate_level(level)
    if problems:
        raise InvalidLevel("; ".join(problems))
    sim = Sim(level)
    state = sim.normalize(sim.initial)
    for i, mv in enumerate(trace):
        try:
            internal = sim.move_from_public(mv)
        except (KeyError, IllegalMove):
            raise IllegalMoveAt(i, mv)
        if internal not in sim.legal_moves(state):
            raise IllegalMoveAt(i, mv)
        state = sim.apply(state, internal)
    return sim.to_level(state)
