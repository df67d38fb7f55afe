"""Authored gadget templates.

Every template is a rectangular level fragment with typed ports.  A port
is a tunnel mouth on the fragment boundary plus a two-cell pocket:
an outer *park* cell (reversible presence; parked blocks hold the latch
yoke up) and an inner *commit* cell beside a trigger flower (entering it
blooms the block, pushing the yoke up one row for good).

The shared mechanism: a single movable "yoke" polyomino rests its feet on
the pocket cells.  While at least one pocket is occupied the yoke floats;
if all empty it drops one row, plugging every pocket and stranding the
signal block, which is the irreversible failure state.  A bloom in any
pocket pushes the yoke up one row, which carries the signal block to its
flower (or opens its path), completing the gadget.

The AND template adds a second yoke and a sliding shuttle under the blue
pocket: the shuttle spreads the blue block's support under both yokes,
and must be stowed aside (two-three slides) before the blue block may
leave.  The signal block rides one yoke while its flower rides the other,
so they only meet when both yokes have been pushed up.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..engine import Level, mirror as mirror_level
from ..grid import parse_grid


@dataclass(frozen=True)
class Port:
    slot: int          # 1 = top, 2 = middle, 3 = bottom (signature rows)
    side: str          # "left" | "right"
    weight: int        # 1 red edge, 2 blue edge
    row: int           # y of the tunnel mouth / pocket
    mouth: tuple       # boundary cell
    park: tuple        # reversible in-gadget cell
    commit: tuple      # bloom-trigger cell


@dataclass(frozen=True)
class GadgetTemplate:
    name: str
    signature: str     # e.g. "B..|.BB", or a role tag for bend/terminator
    level: Level
    ports: tuple       # of Port
    pad_rows: tuple    # row indices duplicable for vertical stretching
    signal_blocks: tuple  # ids whose bloom means "gadget satisfied"
    min_inflow: int = 2
    # canonical placement tweaks: (port, block_id, dx, dy) applied to the
    # named block whenever that port's edge block is parked outside (e.g.
    # the AND shuttle rests stowed while the blue block is away)
    out_shifts: tuple = ()
    # composite templates: canonical placements of internal machinery per
    # legal projection mask: (mask, ((block_id, "cell"|"shift", a, b), ...))
    rep_placements: tuple = ()
    # key into the composer's maker table for row-stretching composites
    maker_key: str = ""

    @property
    def width(self):
        return self.level.width

    @property
    def height(self):
        return self.level.height


# ---------------------------------------------------------------------------
# Base OR gadget, signature B..|.BB
#
# Left-top port row 8; right-middle row 5; right-bottom row 2.  One yoke
# (A) with foot pairs over all three pockets, and the signal block b
# riding a platform till the yoke rises one row to meet its flower.
# ---------------------------------------------------------------------------

_OR_GRID = """
#############
###.........#
###AAAAAAAAA#
##.A.A.A...A#
##AA.A.A.*.A#
....*A.A.#bA#
#####A.A.#AA#
#####A.AA#..#
#####A*......
####.A#######
####AA#######
###*.........
#############
#############
"""


def _or_template() -> GadgetTemplate:
    level = parse_grid(_OR_GRID)
    ports = (
        Port(1, "left", 2, 8, (0, 8), (2, 8), (3, 8)),
        Port(2, "right", 2, 5, (12, 5), (8, 5), (7, 5)),
        Port(3, "right", 2, 2, (12, 2), (5, 2), (4, 2)),
    )
    return GadgetTemplate(
        name="or_base",
        signature="B..|.BB",
        level=level,
        ports=ports,
        pad_rows=(1, 4, 7, 10),
        signal_blocks=("b0",),
    )


# ---------------------------------------------------------------------------
# Constrained blue edge terminator: one blue port (left, row 2).
# ---------------------------------------------------------------------------

_TERM_GRID = """
#########
###.....#
###AAAAA#
###A...A#
###A.*.A#
##.A.#bA#
##AA.#AA#
....*#..#
#########
#########
"""


def _terminator_template() -> GadgetTemplate:
    level = parse_grid(_TERM_GRID)
    ports = (Port(1, "left", 2, 2, (0, 2), (2, 2), (3, 2)),)
    return GadgetTemplate(
        name="terminator",
        signature="terminator",
        level=level,
        ports=ports,
        pad_rows=(1, 8),
        signal_blocks=("b0",),
    )


# ---------------------------------------------------------------------------
# Red bend: two red ports on the same (right) side, rows 5 and 2.
# Solvable iff one of the two port blocks blooms while parked inside,
# holding the yoke up.
# ---------------------------------------------------------------------------

_BEND_GRID = """
#############
#####.......#
#####AAAAAAA#
#####A.A...A#
#####A.A.*.A#
#####A.A.#bA#
#####A.A.#AA#
#####A.AA#..#
#####A*......
####.A#######
####AA#######
###*.........
#############
#############
"""


def _bend_template() -> GadgetTemplate:
    level = parse_grid(_BEND_GRID)
    ports = (
        Port(2, "right", 1, 5, (12, 5), (8, 5), (7, 5)),
        Port(3, "right", 1, 2, (12, 2), (5, 2), (4, 2)),
    )
    return GadgetTemplate(
        name="red_bend",
        signature="bend",
        level=level,
        ports=ports,
        pad_rows=(1, 4, 7, 10),
        signal_blocks=("b0",),
        min_inflow=1,
    )


# ---------------------------------------------------------------------------
# Base AND gadget, signature R..|.RB
#
# Left-top red port row 12, right-middle red port row 8, right-bottom
# blue port row 2.  Yoke A latches (blue or red2), yoke C latches
# (blue or red3); the shuttle D under the blue pocket carries both yoke
# feet while the blue block is parked, and is stowed west (3 slides)
# to release the blue block, leaving the yokes on their red supports.
# The signal block b rides yoke A; its flower rides yoke C.
# ---------------------------------------------------------------------------

_AND_GRID = """
###################
###......##....####
##.AAAAAA##CCCC####
##AA....A##CC.C####
....*###A..CC#C####
########A..CC#C####
########Ab#*C.C####
########AA#.CCC####
########.A#CC......
#########A#C.*#####
#########A.C#######
########.D.C#######
########.DDD#######
#########.DD#######
#########*.........
#########E#########
###################
"""


def _and_template() -> GadgetTemplate:
    level = parse_grid(_AND_GRID)
    ports = (
        Port(1, "left", 1, 12, (0, 12), (2, 12), (3, 12)),
        Port(2, "right", 1, 8, (18, 8), (14, 8), (13, 8)),
        Port(3, "right", 2, 2, (18, 2), (11, 2), (10, 2)),
    )
    return GadgetTemplate(
        name="and_base",
        signature="R..|.RB",
        level=level,
        ports=ports,
        pad_rows=(0, 4, 11, 15),
        signal_blocks=("b0",),
        out_shifts=((2, "GD", -1, 0),),
    )


# ---------------------------------------------------------------------------
# Further authored OR chiralities.  The paper's own footnote observes that
# OR gadgets tolerate re-placing their tunnels; these reuse the same yoke
# pocket/riser idiom so the reducer can lay out compact levels.  The schema
# chain still derives every non-base signature independently.
# ---------------------------------------------------------------------------

_OR_RRR_GRID = """
#############
#..........##
#AAAAAAAAAA##
#A...A.A..A.#
#A.*#A.A..AA#
#Ab##A.A#*...
#AA##A.A.####
#..##A.AA####
#####A*......
####.A#######
####AA#######
###*.........
#############
#############
"""

_OR_RLR_GRID = """
#############
##.........##
##AAAAAAAAA##
#.A..A....A.#
#.A..A.*#.AA#
##A..Ab##*...
#.A..AA#.####
#AA.#A.######
...*#A#######
####.A#######
####AA#######
###*.........
#############
#############
"""

_OR_RRL_GRID = """
#############
###.........#
###AAAAAAAA##
###A...A..A.#
###A*..A..AA#
###A#b.A#*...
##.A#AAA.####
###A#..AA####
###A##*......
##.A#########
##AA.########
....*########
#############
#############
"""


def _or_rrr_template() -> GadgetTemplate:
    level = parse_grid(_OR_RRR_GRID)
    ports = (
        Port(1, "right", 2, 8, (12, 8), (11, 8), (10, 8)),
        Port(2, "right", 2, 5, (12, 5), (8, 5), (7, 5)),
        Port(3, "right", 2, 2, (12, 2), (5, 2), (4, 2)),
    )
    return GadgetTemplate(
        name="or_rrr",
        signature="...|BBB",
        level=level,
        ports=ports,
        pad_rows=(1, 4, 7, 10, 12),
        signal_blocks=("b0",),
    )


def _or_rlr_template() -> GadgetTemplate:
    level = parse_grid(_OR_RLR_GRID)
    ports = (
        Port(1, "right", 2, 8, (12, 8), (11, 8), (10, 8)),
        Port(2, "left", 2, 5, (0, 5), (1, 5), (2, 5)),
        Port(3, "right", 2, 2, (12, 2), (5, 2), (4, 2)),
    )
    return GadgetTemplate(
        name="or_rlr",
        signature=".B.|B.B",
        level=level,
        ports=ports,
        pad_rows=(1, 4, 7, 10, 12),
        signal_blocks=("b0",),
    )


def _or_rrl_template() -> GadgetTemplate:
    level = parse_grid(_OR_RRL_GRID)
    ports = (
        Port(1, "right", 2, 8, (12, 8), (11, 8), (10, 8)),
        Port(2, "right", 2, 5, (12, 5), (8, 5), (7, 5)),
        Port(3, "left", 2, 2, (0, 2), (2, 2), (3, 2)),
    )
    return GadgetTemplate(
        name="or_rrl",
        signature="..B|BB.",
        level=level,
        ports=ports,
        pad_rows=(1, 4, 7, 10, 12),
        signal_blocks=("b0",),
    )


_BASES = {}


def base_templates() -> dict:
    if not _BASES:
        for t in (
            _or_template(),
            _and_template(),
            _bend_template(),
            _terminator_template(),
            _or_rrr_template(),
            _or_rlr_template(),
            _or_rrl_template(),
        ):
            _BASES[t.name] = t
    return dict(_BASES)


def compact_catalog() -> dict:
    """signature -> smallest authored template (plus mirrors); used by the
    reducer to keep levels small.  Non-covered signatures fall back to the
    schema-derived composites."""
    out = {}
    for t in base_templates().values():
        if "|" not in t.signature:
            continue
        out[t.signature] = t
        m = mirror_template(t)
        out.setdefault(m.signature, m)
    return out


def get_base(name: str) -> GadgetTemplate:
    return base_templates()[name]


# -- signature helpers -------------------------------------------------------


def parse_signature(sig: str):
    """Return ((x1,x2,x3),(y1,y2,y3)) from 'x1x2x3|y1y2y3' using B/R/. ."""
    left, right = sig.split("|")
    if len(left) != 3 or len(right) != 3:
        raise ValueError(f"bad signature {sig!r}")
    for i in range(3):
        pair = {left[i], right[i]}
        if left[i] not in "BR." or right[i] not in "BR.":
            raise ValueError(f"bad signature {sig!r}")
        if left[i] != "." and right[i] != ".":
            raise ValueError(f"signature {sig!r} has two ports in one row")
    letters = sorted(ch for ch in left + right if ch != ".")
    if letters != ["B", "B", "B"] and letters != ["B", "R", "R"]:
        raise ValueError(f"signature {sig!r} is neither OR nor AND")
    return tuple(left), tuple(right)


def mirror_signature(sig: str) -> str:
    """Swap the two sides row-wise: x1x2x3|y1y2y3 -> y1y2y3|x1x2x3."""
    left, right = parse_signature(sig)
    return "".join(right) + "|" + "".join(left)


def signature_of_template(t: GadgetTemplate) -> str:
    left = ["."] * 3
    right = ["."] * 3
    for p in t.ports:
        ch = "B" if p.weight == 2 else "R"
        if p.side == "left":
            left[p.slot - 1] = ch
        else:
            right[p.slot - 1] = ch
    return "".join(left) + "|" + "".join(right)


def mirror_template(t: GadgetTemplate, name=None) -> GadgetTemplate:
    """Reflect a template across the vertical axis (ports swap sides)."""
    level = mirror_level(t.level)
    w = t.width
    ports = tuple(
        replace(
            p,
            side="left" if p.side == "right" else "right",
            mouth=(w - 1 - p.mouth[0], p.mouth[1]),
            park=(w - 1 - p.park[0], p.park[1]),
            commit=(w - 1 - p.commit[0], p.commit[1]),
        )
        for p in t.ports
    )
    sig = t.signature
    if "|" in sig:
        sig = mirror_signature(sig)
    shifts = tuple((p, bid, -dx, dy) for (p, bid, dx, dy) in t.out_shifts)
    reps = tuple(
        (
            mask,
            tuple(
                (bid, op, (w - 1 - a) if op == "cell" else -a, b)
                for (bid, op, a, b) in moves
            ),
        )
        for (mask, moves) in t.rep_placements
    )
    return replace(
        t, name=name or t.name + "_mirror", signature=sig, level=level, ports=ports,
        out_shifts=shifts, rep_placements=reps,
    )


def all_vertex_signatures():
    """The 8 OR + 24 AND signatures, in a stable order."""
    import itertools as it

    out = []
    # OR: three Bs, one per row, each on either side
    for sides in it.product((0, 1), repeat=3):
        left, right = ["."] * 3, ["."] * 3
        for i, s in enumerate(sides):
            (left if s == 0 else right)[i] = "B"
        out.append("".join(left) + "|" + "".join(right))
    # AND: one B and two Rs over the three rows, each on either side
    for perm in sorted(set(it.permutations("BRR"))):
        for sides in it.product((0, 1), repeat=3):
            left, right = ["."] * 3, ["."] * 3
            for i, s in enumerate(sides):
                (left if s == 0 else right)[i] = perm[i]
            out.append("".join(left) + "|" + "".join(right))
    seen = []
    for s in out:
        if s not in seen:
            seen.append(s)
    return seen
