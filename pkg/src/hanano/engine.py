"""Core mechanics of the gravity sliding-block puzzle.

The board holds immovable gray polyominoes, movable gray polyominoes,
1x1 colored arrow blocks, and flowers affixed to blocks.  A move slides a
block (with its attached flowers) one column left or right, or swaps two
horizontally adjacent width-one blocks.  After a move, gravity settles
everything, then every colored block touching a same-color flower blooms
(mandatorily, in a fixed scan order), possibly pushing blocks along its
arrow; settling and blooming alternate until quiescent.

Origin is the bottom-left cell; gravity pulls toward y = 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional, Sequence

COLORS = ("red", "blue", "yellow")
ARROWS = ("up", "down", "left", "right")
KINDS = ("immovable-gray", "movable-gray", "colored")

ARROW_DELTA = {"up": (0, 1), "down": (0, -1), "left": (-1, 0), "right": (1, 0)}
SIDE_OPPOSITE = {"up": "down", "down": "up", "left": "right", "right": "left"}


class IllegalMove(Exception):
    """Raised when apply_move is given a move not in legal_moves."""


@dataclass(frozen=True)
class Block:
    id: str
    kind: str
    cells: frozenset  # of (x, y)
    color: Optional[str] = None
    arrow: Optional[str] = None
    bloomed: bool = False


@dataclass(frozen=True)
class Flower:
    color: str
    cell: tuple  # (x, y)
    anchor_block: str
    anchor_side: str  # side of the anchor cell the flower sits against


@dataclass(frozen=True)
class Slide:
    block: str
    direction: str  # "left" | "right"


@dataclass(frozen=True)
class Swap:
    block_a: str
    block_b: str


Move = object  # Slide | Swap


@dataclass(frozen=True)
class Level:
    width: int
    height: int
    blocks: tuple = ()
    flowers: tuple = ()

    def block(self, block_id: str) -> Block:
        for b in self.blocks:
            if b.id == block_id:
                return b
        raise KeyError(block_id)


# GameState is a Level whose positions reflect the current configuration;
# between moves it is settled and bloom-quiescent.
GameState = Level


def _connected(cells) -> bool:
    cells = set(cells)
    if not cells:
        return False
    seen = set()
    stack = [next(iter(cells))]
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        x, y = c
        for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if n in cells and n not in seen:
                stack.append(n)
    return len(seen) == len(cells)


def validate_level(level: Level) -> list:
    """Return a list of human-readable invariant violations (empty = valid)."""
    problems = []
    if level.width <= 0 or level.height <= 0:
        problems.append("grid dimensions must be positive")
        return problems
    occupied = {}
    ids = set()
    for b in level.blocks:
        if b.id in ids:
            problems.append(f"duplicate block id {b.id!r}")
        ids.add(b.id)
        if b.kind not in KINDS:
            problems.append(f"block {b.id}: unknown kind {b.kind!r}")
        if not b.cells:
            problems.append(f"block {b.id}: no cells")
            continue
        if not _connected(b.cells):
            problems.append(f"block {b.id}: cells not edge-connected")
        for (x, y) in b.cells:
            if not (0 <= x < level.width and 0 <= y < level.height):
                problems.append(f"block {b.id}: cell ({x},{y}) out of bounds")
            elif (x, y) in occupied:
                problems.append(f"overlap at ({x},{y})")
            else:
                occupied[(x, y)] = b.id
        if b.kind == "colored":
            if len(b.cells) != 1:
                problems.append(f"block {b.id}: colored blocks must be 1x1")
            if b.color not in COLORS:
                problems.append(f"block {b.id}: colored block needs a color")
            if b.arrow not in ARROWS:
                problems.append(f"block {b.id}: colored block needs an arrow")
        else:
            if b.color is not None or b.arrow is not None or b.bloomed:
                problems.append(f"block {b.id}: gray blocks carry no color/arrow/bloom")
    by_id = {b.id: b for b in level.blocks}
    for f in level.flowers:
        if f.color not in COLORS:
            problems.append(f"flower at {f.cell}: unknown color {f.color!r}")
        x, y = f.cell
        if not (0 <= x < level.width and 0 <= y < level.height):
            problems.append(f"flower at {f.cell}: out of bounds")
        elif f.cell in occupied:
            problems.append(f"overlap at ({x},{y})")
        else:
            occupied[f.cell] = "*"
        anchor = by_id.get(f.anchor_block)
        if anchor is None:
            problems.append(f"flower at {f.cell}: anchor block {f.anchor_block!r} does not exist")
            continue
        if f.anchor_side not in ARROWS:
            problems.append(f"flower at {f.cell}: bad anchor side {f.anchor_side!r}")
            continue
        dx, dy = ARROW_DELTA[f.anchor_side]
        if (x - dx, y - dy) not in anchor.cells:
            problems.append(
                f"flower at {f.cell}: not adjacent to block {f.anchor_block} on side {f.anchor_side}"
            )
    return problems


# ---------------------------------------------------------------------------
# Internal packed simulation
# ---------------------------------------------------------------------------
#
# A *composite* is a block plus its attached flowers; it moves as a unit.
# Shapes (cell offsets + block metadata) are interned so a dynamic state is
# just a tuple of (shape_id, ox, oy) per movable composite, index-aligned
# with the level's movable block ids.  Blooming changes a composite's shape.


class _ShapeRegistry:
    def __init__(self):
        self._ids = {}
        self.kind = []       # 'M' movable gray, 'C' colored
        self.color = []
        self.arrow = []
        self.bloomed = []
        self.block_cells = []   # tuple of (dx,dy)
        self.flowers = []       # tuple of (dx,dy,color,side)
        self.cells = []         # tuple of all solid (dx,dy)
        self.width = []
        self.rows = []          # tuple of dy rows covered (for swap checks)
        self.flower_at = []     # {(dx,dy): color}
        self.left_edge = []     # cells with no shape-cell to their left
        self.right_edge = []
        self.bottom_edge = []

    def intern(self, kind, color, arrow, bloomed, block_cells, flowers):
        # normalize offsets so min x = min y = 0 across every solid cell
        allc = list(block_cells) + [(fx, fy) for (fx, fy, _c, _s) in flowers]
        mx = min(c[0] for c in allc)
        my = min(c[1] for c in allc)
        bc = tuple(sorted((x - mx, y - my) for (x, y) in block_cells))
        fl = tuple(sorted((x - mx, y - my, c, s) for (x, y, c, s) in flowers))
        key = (kind, color, arrow, bloomed, bc, fl)
        sid = self._ids.get(key)
        if sid is None:
            sid = len(self.kind)
            self._ids[key] = sid
            self.kind.append(kind)
            self.color.append(color)
            self.arrow.append(arrow)
            self.bloomed.append(bloomed)
            self.block_cells.append(bc)
            self.flowers.append(fl)
            cells = tuple(sorted(set(bc) | {(x, y) for (x, y, _c, _s) in fl}))
            self.cells.append(cells)
            xs = {x for (x, _y) in cells}
            self.width.append(max(xs) - min(xs) + 1)
            self.rows.append(tuple(sorted({y for (_x, y) in cells})))
            self.flower_at.append({(x, y): c for (x, y, c, _s) in fl})
            cellset = set(cells)
            self.left_edge.append(tuple(c for c in cells if (c[0] - 1, c[1]) not in cellset))
            self.right_edge.append(tuple(c for c in cells if (c[0] + 1, c[1]) not in cellset))
            self.bottom_edge.append(tuple(c for c in cells if (c[0], c[1] - 1) not in cellset))
        return sid, (mx, my)


class Sim:
    """Packed simulator for one level geometry.

    States are tuples of (shape_id, ox, oy), one entry per movable block,
    in the order the blocks appear in the level.
    """

    def __init__(self, level: Level):
        self.level = level
        self.width = level.width
        self.height = level.height
        self.shapes = _ShapeRegistry()
        flowers_by_block = {}
        for f in level.flowers:
            flowers_by_block.setdefault(f.anchor_block, []).append(f)

        self.static_cells = set()
        self.static_flowers = {}  # cell -> color
        self.movable_ids = []
        init = []
        for b in level.blocks:
            att = flowers_by_block.get(b.id, [])
            if b.kind == "immovable-gray":
                self.static_cells.update(b.cells)
                for f in att:
                    self.static_cells.add(f.cell)
                    self.static_flowers[f.cell] = f.color
                continue
            kind = "C" if b.kind == "colored" else "M"
            fl = [(f.cell[0], f.cell[1], f.color, f.anchor_side) for f in att]
            sid, (ox, oy) = self.shapes.intern(
                kind, b.color, b.arrow, b.bloomed, tuple(b.cells), tuple(fl)
            )
            self.movable_ids.append(b.id)
            init.append((sid, ox, oy))
        self.initial = tuple(init)
        self.index_of = {bid: i for i, bid in enumerate(self.movable_ids)}

    # -- geometry helpers --

    def occ(self, state):
        """Map every dynamically occupied cell to its composite index."""
        m = {}
        cells = self.shapes.cells
        for i, (sid, ox, oy) in enumerate(state):
            for (dx, dy) in cells[sid]:
                m[(ox + dx, oy + dy)] = i
        return m

    def solid(self, state):
        occ = self.occ(state)
        return occ, self.static_cells

    def flower_color_at(self, state, cell, occ=None):
        c = self.static_flowers.get(cell)
        if c is not None:
            return c
        if occ is None:
            occ = self.occ(state)
        i = occ.get(cell)
        if i is None:
            return None
        sid, ox, oy = state[i]
        for (dx, dy, color, _s) in self.shapes.flowers[sid]:
            if (ox + dx, oy + dy) == cell:
                return color
        return None

    # -- gravity --

    def _drop_all(self, slist, occ, fallers):
        shapes = self.shapes
        for i in fallers:
            sid, ox, oy = slist[i]
            for (dx, dy) in shapes.cells[sid]:
                del occ[(ox + dx, oy + dy)]
        for i in fallers:
            sid, ox, oy = slist[i]
            slist[i] = (sid, ox, oy - 1)
            for (dx, dy) in shapes.cells[sid]:
                occ[(ox + dx, oy + dy - 1)] = i

    def _settle_inplace(self, slist, occ, seeds=None):
        """Gravity fixpoint over a mutable state list + occupancy map.

        seeds: composite indices whose support may have changed; None means
        everything is suspect.  Returns the set of composites that fell.
        """
        shapes = self.shapes
        static = self.static_cells
        n = len(slist)
        suspects = set(range(n)) if seeds is None else set(seeds)
        fell = set()
        if seeds is not None:
            # fast path: every seed directly supported by floor, statics,
            # or a non-seed composite
            quick = True
            for i in suspects:
                sid, ox, oy = slist[i]
                sup = False
                for (dx, dy) in shapes.bottom_edge[sid]:
                    cy = oy + dy
                    below = (ox + dx, cy - 1)
                    if cy == 0 or below in static:
                        sup = True
                        break
                    j = occ.get(below)
                    if j is not None and j != i and j not in suspects:
                        sup = True
                        break
                if not sup:
                    quick = False
                    break
            if quick:
                return fell
        while True:
            # expand to everything transitively resting on a suspect
            frontier = list(suspects)
            while frontier:
                j = frontier.pop()
                sid, ox, oy = slist[j]
                for (dx, dy) in shapes.cells[sid]:
                    above = (ox + dx, oy + dy + 1)
                    k = occ.get(above)
                    if k is not None and k != j and k not in suspects:
                        suspects.add(k)
                        frontier.append(k)
            # supported closure within suspects; outsiders count as solid
            supported = set()
            rests_on = {i: [] for i in suspects}
            for i in suspects:
                sid, ox, oy = slist[i]
                sup = False
                for (dx, dy) in shapes.cells[sid]:
                    cy = oy + dy
                    below = (ox + dx, cy - 1)
                    if cy == 0 or below in static:
                        sup = True
                        break
                    j = occ.get(below)
                    if j is not None and j != i:
                        if j not in suspects:
                            sup = True
                            break
                        rests_on[j].append(i)
                if sup:
                    supported.add(i)
            frontier = list(supported)
            while frontier:
                j = frontier.pop()
                for i in rests_on.get(j, ()):
                    if i not in supported:
                        supported.add(i)
                        frontier.append(i)
            fallers = suspects - supported
            if not fallers:
                return fell
            self._drop_all(slist, occ, fallers)
            fell |= fallers
            suspects = set(fallers)

    def settle(self, state):
        slist = list(state)
        occ = self.occ(state)
        self._settle_inplace(slist, occ)
        return tuple(slist)

    # -- blooming --

    def _try_push(self, state, occ, start, delta, forbid):
        """Piston closure: composites that must shift by delta.

        Returns the set of indices, or None if blocked by a wall, a static
        cell, or the forbidden composite (the bloomer itself).
        """
        shapes = self.shapes
        closure = {start}
        frontier = [start]
        w, h = self.width, self.height
        dx0, dy0 = delta
        while frontier:
            i = frontier.pop()
            sid, ox, oy = state[i]
            for (dx, dy) in shapes.cells[sid]:
                nx, ny = ox + dx + dx0, oy + dy + dy0
                if not (0 <= nx < w and 0 <= ny < h):
                    return None
                if (nx, ny) in self.static_cells:
                    return None
                j = occ.get((nx, ny))
                if j is None or j in closure:
                    continue
                if j == forbid:
                    return None
                closure.add(j)
                frontier.append(j)
        return closure

    def _spawn_flower_inplace(self, slist, occ, i, cell):
        """Attach a new flower (absolute cell) to composite i, in place."""
        shapes = self.shapes
        sid, ox, oy = slist[i]
        color = shapes.color[sid]
        arrow = shapes.arrow[sid]
        for (dx, dy) in shapes.cells[sid]:
            del occ[(ox + dx, oy + dy)]
        bc = [(ox + dx, oy + dy) for (dx, dy) in shapes.block_cells[sid]]
        fl = [(ox + dx, oy + dy, c, s) for (dx, dy, c, s) in shapes.flowers[sid]]
        fl.append((cell[0], cell[1], color, arrow))
        nsid, (nox, noy) = shapes.intern("C", color, arrow, True, tuple(bc), tuple(fl))
        slist[i] = (nsid, nox, noy)
        for (dx, dy) in shapes.cells[nsid]:
            occ[(nox + dx, noy + dy)] = i

    def _shift_closure(self, slist, occ, closure, dx, dy):
        shapes = self.shapes
        for k in closure:
            sid, ox, oy = slist[k]
            for (cdx, cdy) in shapes.cells[sid]:
                del occ[(ox + cdx, oy + cdy)]
        for k in closure:
            sid, ox, oy = slist[k]
            slist[k] = (sid, ox + dx, oy + dy)
            for (cdx, cdy) in shapes.cells[sid]:
                occ[(ox + dx + cdx, oy + dy + cdy)] = k

    def _flower_color(self, slist, occ, cell):
        c = self.static_flowers.get(cell)
        if c is not None:
            return c
        i = occ.get(cell)
        if i is None:
            return None
        sid, ox, oy = slist[i]
        return self.shapes.flower_at[sid].get((cell[0] - ox, cell[1] - oy))

    def _resolve_inplace(self, slist, occ, dirty=None):
        """Mandatory blooms to fixpoint.  dirty: composites that moved since
        the last quiescent state; only they (and unbloomed colored blocks
        beside their cells) can have gained a flower adjacency."""
        shapes = self.shapes
        scope = None
        if dirty is not None:
            scope = set()
            for i in dirty:
                sid, ox, oy = slist[i]
                if shapes.kind[sid] == "C" and not shapes.bloomed[sid]:
                    scope.add(i)
                for (dx, dy) in shapes.cells[sid]:
                    for nb in (
                        (ox + dx + 1, oy + dy),
                        (ox + dx - 1, oy + dy),
                        (ox + dx, oy + dy + 1),
                        (ox + dx, oy + dy - 1),
                    ):
                        j = occ.get(nb)
                        if j is not None and j != i:
                            sj = slist[j][0]
                            if shapes.kind[sj] == "C" and not shapes.bloomed[sj]:
                                scope.add(j)
            if not scope:
                return
        while True:
            candidates = []
            for i, (sid, ox, oy) in enumerate(slist):
                if scope is not None and i not in scope:
                    continue
                if shapes.kind[sid] == "C" and not shapes.bloomed[sid]:
                    (dx, dy) = shapes.block_cells[sid][0]
                    candidates.append((oy + dy, ox + dx, i))
            candidates.sort()
            progressed = False
            for (by, bx, i) in candidates:
                color = shapes.color[slist[i][0]]
                adjacent = False
                for nb in ((bx + 1, by), (bx - 1, by), (bx, by + 1), (bx, by - 1)):
                    if self._flower_color(slist, occ, nb) == color:
                        adjacent = True
                        break
                if not adjacent:
                    continue
                if self._attempt_bloom_inplace(slist, occ, i, (bx, by)):
                    self._settle_inplace(slist, occ)
                    progressed = True
                    scope = None  # a bloom can cascade anywhere
                    break
            if not progressed:
                return

    def _attempt_bloom_inplace(self, slist, occ, i, block_cell):
        arrow = self.shapes.arrow[slist[i][0]]
        dx, dy = ARROW_DELTA[arrow]
        bx, by = block_cell
        target = (bx + dx, by + dy)
        w, h = self.width, self.height
        if 0 <= target[0] < w and 0 <= target[1] < h:
            if target not in self.static_cells and target not in occ:
                self._spawn_flower_inplace(slist, occ, i, target)
                return True
            j = occ.get(target)
            if j is not None and j != i:
                closure = self._try_push(slist, occ, j, (dx, dy), forbid=i)
                if closure is not None:
                    self._shift_closure(slist, occ, closure, dx, dy)
                    self._spawn_flower_inplace(slist, occ, i, target)
                    return True
        closure = self._try_push(slist, occ, i, (-dx, -dy), forbid=-1)
        if closure is not None:
            self._shift_closure(slist, occ, closure, -dx, -dy)
            self._spawn_flower_inplace(slist, occ, i, (bx, by))
            return True
        return False

    def resolve_blooms(self, state):
        """Mandatory blooms in (row, column) scan order, to fixpoint."""
        slist = list(state)
        occ = self.occ(state)
        self._resolve_inplace(slist, occ)
        return tuple(slist)

    def normalize(self, state):
        slist = list(state)
        occ = self.occ(state)
        self._settle_inplace(slist, occ)
        self._resolve_inplace(slist, occ)
        return tuple(slist)

    # -- moves --

    def legal_moves(self, state, occ=None):
        """(kind, i, arg) triples: ('slide', i, dx) and ('swap', i, j)."""
        shapes = self.shapes
        if occ is None:
            occ = self.occ(state)
        moves = []
        w, h = self.width, self.height
        n = len(state)
        static = self.static_cells
        for i in range(n):
            sid, ox, oy = state[i]
            for dx, edge in ((-1, shapes.left_edge[sid]), (1, shapes.right_edge[sid])):
                ok = True
                for (cx, cy) in edge:
                    nx, ny = ox + cx + dx, oy + cy
                    if not (0 <= nx < w) or (nx, ny) in static:
                        ok = False
                        break
                    j = occ.get((nx, ny))
                    if j is not None and j != i:
                        ok = False
                        break
                if ok:
                    moves.append(("slide", i, dx))
        narrow = [
            (state[i][1], i) for i in range(n) if shapes.width[state[i][0]] == 1
        ]
        narrow.sort()
        for a in range(len(narrow)):
            ox_i, i = narrow[a]
            for b in range(a + 1, len(narrow)):
                ox_j, j = narrow[b]
                if ox_j - ox_i > 1:
                    break
                if ox_j - ox_i != 1:
                    continue
                sid_i, _oxi, oy_i = state[i]
                sid_j, _oxj, oy_j = state[j]
                rows_i = [oy_i + r for r in shapes.rows[sid_i]]
                rows_j = [oy_j + r for r in shapes.rows[sid_j]]
                if rows_i[-1] < rows_j[0] or rows_j[-1] < rows_i[0]:
                    continue
                if not (set(rows_i) & set(rows_j)):
                    continue
                ok = True
                for y in rows_i:
                    c = (ox_j, y)
                    k = occ.get(c)
                    if c in static or (k is not None and k not in (i, j)):
                        ok = False
                        break
                if ok:
                    for y in rows_j:
                        c = (ox_i, y)
                        k = occ.get(c)
                        if c in static or (k is not None and k not in (i, j)):
                            ok = False
                            break
                if ok:
                    moves.append(("swap", min(i, j), max(i, j)))
        return moves

    def apply(self, state, move, occ=None):
        kind, i, arg = move
        shapes = self.shapes
        slist = list(state)
        occ = dict(occ) if occ is not None else self.occ(state)
        seeds = {i}
        if kind == "slide":
            sid, ox, oy = slist[i]
            for (dx, dy) in shapes.cells[sid]:
                cell = (ox + dx, oy + dy)
                del occ[cell]
                above = (cell[0], cell[1] + 1)
                k = occ.get(above)
                if k is not None:
                    seeds.add(k)
            slist[i] = (sid, ox + arg, oy)
            for (dx, dy) in shapes.cells[sid]:
                occ[(ox + arg + dx, oy + dy)] = i
        else:
            j = arg
            seeds.add(j)
            for k in (i, j):
                sid, ox, oy = slist[k]
                for (dx, dy) in shapes.cells[sid]:
                    cell = (ox + dx, oy + dy)
                    del occ[cell]
                    above = (cell[0], cell[1] + 1)
                    kk = occ.get(above)
                    if kk is not None:
                        seeds.add(kk)
            sid_i, ox_i, oy_i = slist[i]
            sid_j, ox_j, oy_j = slist[j]
            slist[i] = (sid_i, ox_j, oy_i)
            slist[j] = (sid_j, ox_i, oy_j)
            for k in (i, j):
                sid, ox, oy = slist[k]
                for (dx, dy) in shapes.cells[sid]:
                    occ[(ox + dx, oy + dy)] = k
        moved = {i} if kind == "slide" else {i, arg}
        fell = self._settle_inplace(slist, occ, seeds=seeds)
        self._resolve_inplace(slist, occ, dirty=moved | fell)
        return tuple(slist)

    def expand(self, state):
        """All (move, successor) pairs, sharing one occupancy map."""
        occ = self.occ(state)
        return [(mv, self.apply(state, mv, occ)) for mv in self.legal_moves(state, occ)]

    def is_solved(self, state):
        shapes = self.shapes
        for (sid, _ox, _oy) in state:
            if shapes.kind[sid] == "C" and not shapes.bloomed[sid]:
                return False
        return True

    def key(self, state):
        return tuple(sorted(state))

    # -- conversions --

    def to_level(self, state) -> Level:
        blocks = []
        flowers = []
        shapes = self.shapes
        by_id = {b.id: b for b in self.level.blocks}
        for b in self.level.blocks:
            if b.kind == "immovable-gray":
                blocks.append(b)
        for f in self.level.flowers:
            if by_id[f.anchor_block].kind == "immovable-gray":
                flowers.append(f)
        for i, (sid, ox, oy) in enumerate(state):
            bid = self.movable_ids[i]
            kind = "colored" if shapes.kind[sid] == "C" else "movable-gray"
            cells = frozenset((ox + dx, oy + dy) for (dx, dy) in shapes.block_cells[sid])
            blocks.append(
                Block(
                    id=bid,
                    kind=kind,
                    cells=cells,
                    color=shapes.color[sid],
                    arrow=shapes.arrow[sid],
                    bloomed=shapes.bloomed[sid],
                )
            )
            for (dx, dy, color, side) in shapes.flowers[sid]:
                flowers.append(
                    Flower(color=color, cell=(ox + dx, oy + dy), anchor_block=bid, anchor_side=side)
                )
        return Level(self.level.width, self.level.height, tuple(blocks), tuple(flowers))

    def move_to_public(self, move) -> Move:
        kind, i, arg = move
        if kind == "slide":
            return Slide(self.movable_ids[i], "right" if arg > 0 else "left")
        return Swap(self.movable_ids[i], self.movable_ids[arg])

    def move_from_public(self, move) -> tuple:
        if isinstance(move, Slide):
            return ("slide", self.index_of[move.block], 1 if move.direction == "right" else -1)
        if isinstance(move, Swap):
            i, j = self.index_of[move.block_a], self.index_of[move.block_b]
            return ("swap", min(i, j), max(i, j))
        raise IllegalMove(f"unknown move {move!r}")


# ---------------------------------------------------------------------------
# Public level-at-a-time API (thin wrappers over Sim)
# ---------------------------------------------------------------------------


def settle(state: GameState) -> GameState:
    sim = Sim(state)
    return sim.to_level(sim.settle(sim.initial))


def resolve_blooms(state: GameState) -> GameState:
    sim = Sim(state)
    return sim.to_level(sim.resolve_blooms(sim.initial))


def normalize(state: GameState) -> GameState:
    """Settle and bloom until quiescent (the between-moves invariant)."""
    sim = Sim(state)
    return sim.to_level(sim.normalize(sim.initial))


def legal_moves(state: GameState) -> list:
    sim = Sim(state)
    return [sim.move_to_public(m) for m in sim.legal_moves(sim.initial)]


def apply_move(state: GameState, move: Move) -> GameState:
    sim = Sim(state)
    internal = sim.move_from_public(move)
    if internal not in sim.legal_moves(sim.initial):
        raise IllegalMove(f"{move!r} is not legal in this state")
    return sim.to_level(sim.apply(sim.initial, internal))


def is_solved(state: GameState) -> bool:
    return all(b.bloomed for b in state.blocks if b.kind == "colored")


def mirror(level: Level) -> Level:
    """Reflect across the vertical axis; left/right arrows and anchors swap."""
    w = level.width
    flip = {"left": "right", "right": "left"}
    blocks = tuple(
        replace(
            b,
            cells=frozenset((w - 1 - x, y) for (x, y) in b.cells),
            arrow=flip.get(b.arrow, b.arrow),
        )
        for b in level.blocks
    )
    flowers = tuple(
        replace(
            f,
            cell=(w - 1 - f.cell[0], f.cell[1]),
            anchor_side=flip.get(f.anchor_side, f.anchor_side),
        )
        for f in level.flowers
    )
    return Level(level.width, level.height, blocks, flowers)


# ---------------------------------------------------------------------------
# Canonical JSON format and ASCII rendering
# ---------------------------------------------------------------------------


def level_to_dict(level: Level) -> dict:
    blocks = []
    for b in level.blocks:
        d = {"id": b.id, "kind": b.kind, "cells": sorted([list(c) for c in b.cells])}
        if b.kind == "colored":
            d["color"] = b.color
            d["arrow"] = b.arrow
            d["bloomed"] = b.bloomed
        blocks.append(d)
    flowers = [
        {
            "color": f.color,
            "cell": list(f.cell),
            "anchor_block": f.anchor_block,
            "anchor_side": f.anchor_side,
        }
        for f in level.flowers
    ]
    return {"width": level.width, "height": level.height, "blocks": blocks, "flowers": flowers}


def level_from_dict(d: dict) -> Level:
    blocks = tuple(
        Block(
            id=str(b["id"]),
            kind=b["kind"],
            cells=frozenset((int(x), int(y)) for (x, y) in b["cells"]),
            color=b.get("color"),
            arrow=b.get("arrow"),
            bloomed=bool(b.get("bloomed", False)),
        )
        for b in d["blocks"]
    )
    flowers = tuple(
        Flower(
            color=f["color"],
            cell=(int(f["cell"][0]), int(f["cell"][1])),
            anchor_block=str(f["anchor_block"]),
            anchor_side=f["anchor_side"],
        )
        for f in d.get("flowers", ())
    )
    return Level(int(d["width"]), int(d["height"]), blocks, flowers)


def level_to_json(level: Level) -> str:
    return json.dumps(level_to_dict(level), indent=2, sort_keys=True)


def level_from_json(text: str) -> Level:
    return level_from_dict(json.loads(text))


def render_ascii(level: Level, legend: bool = True) -> str:
    """Lossy human view: '#' immovable, letters movable gray, b/r/y colored
    (uppercase once bloomed), '*' flowers, '.' empty."""
    grid = [["." for _ in range(level.width)] for _ in range(level.height)]
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    notes = []
    gi = 0
    for b in level.blocks:
        if b.kind == "immovable-gray":
            ch = "#"
        elif b.kind == "movable-gray":
            ch = letters[gi % len(letters)].lower() if gi >= 26 else letters[gi]
            gi += 1
            notes.append(f"{ch}: movable gray {b.id}")
        else:
            ch = b.color[0].upper() if b.bloomed else b.color[0]
            notes.append(f"{ch}: {b.color} block {b.id} arrow={b.arrow} bloomed={b.bloomed}")
        for (x, y) in b.cells:
            grid[y][x] = ch
    for f in level.flowers:
        x, y = f.cell
        grid[y][x] = "*"
        notes.append(f"* at ({x},{y}): {f.color} flower on {f.anchor_block} side={f.anchor_side}")
    rows = ["".join(grid[y]) for y in range(level.height - 1, -1, -1)]
    out = "\n".join(rows)
    if legend and notes:
        out += "\n-- legend --\n" + "\n".join(notes)
    return out
