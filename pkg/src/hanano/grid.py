"""ASCII grid notation for levels.

Rows are written top-down.  Characters:

  '#'        immovable gray (connected runs become separate blocks)
  'A'-'Z'    one movable gray polyomino per letter (skip B/R/Y if colored
             blocks of that letter appear; lowercase is reserved)
  'b','r','y' 1x1 colored blocks (blue/red/yellow), arrow defaults to up
  '*'        flower; its anchor is inferred from the first occupied
             neighbor in priority order below/above/left/right
  '.' or ' ' empty

The flower inference can be overridden per cell, and colored blocks can be
given explicit arrows/colors, via the keyword arguments.
"""

from __future__ import annotations

from .engine import Block, Flower, Level, validate_level

_COLOR_CHARS = {"b": "blue", "r": "red", "y": "yellow"}


def parse_grid(text, arrows=None, flowers=None, block_ids=None):
    """Build a Level from ASCII art.

    arrows: {(x, y): arrow} for colored blocks (default "up").
    flowers: {(x, y): (anchor_id, side)} overriding anchor inference;
             side is the side of the anchor cell the flower sits against.
    block_ids: {char: id} to rename letter blocks.
    """
    arrows = arrows or {}
    flowers = flowers or {}
    block_ids = block_ids or {}
    lines = text.splitlines()
    while lines and not lines[0].strip():
        lines.pop(0)
    while lines and not lines[-1].strip():
        lines.pop()
    # strip common indentation without disturbing interior spaces
    indent = min((len(ln) - len(ln.lstrip(" ")) for ln in lines if ln.strip()), default=0)
    lines = [ln[indent:].rstrip() for ln in lines]
    height = len(lines)
    width = max(len(ln) for ln in lines)
    cell_char = {}
    for row, ln in enumerate(lines):
        y = height - 1 - row
        for x, ch in enumerate(ln):
            if ch in (".", " "):
                continue
            cell_char[(x, y)] = ch

    blocks = []
    owner = {}  # cell -> block id

    # immovable gray: connected components of '#'
    walls = {c for c, ch in cell_char.items() if ch == "#"}
    seen = set()
    wi = 0
    for c in sorted(walls):
        if c in seen:
            continue
        comp = set()
        stack = [c]
        while stack:
            cur = stack.pop()
            if cur in comp:
                continue
            comp.add(cur)
            x, y = cur
            for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if n in walls and n not in comp:
                    stack.append(n)
        seen |= comp
        bid = f"W{wi}"
        wi += 1
        blocks.append(Block(id=bid, kind="immovable-gray", cells=frozenset(comp)))
        for cc in comp:
            owner[cc] = bid

    # movable gray letters
    letters = sorted({ch for ch in cell_char.values() if ch.isalpha() and ch.isupper()})
    for ch in letters:
        cells = frozenset(c for c, v in cell_char.items() if v == ch)
        bid = block_ids.get(ch, f"G{ch}")
        blocks.append(Block(id=bid, kind="movable-gray", cells=cells))
        for cc in cells:
            owner[cc] = bid

    # colored blocks
    ci = 0
    for c in sorted((c for c, v in cell_char.items() if v in _COLOR_CHARS), key=lambda t: (-t[1], t[0])):
        ch = cell_char[c]
        bid = block_ids.get(f"{ch}{ci}", f"{ch}{ci}")
        blocks.append(
            Block(
                id=bid,
                kind="colored",
                cells=frozenset([c]),
                color=_COLOR_CHARS[ch],
                arrow=arrows.get(c, "up"),
            )
        )
        owner[c] = bid
        ci += 1

    # flowers
    flower_list = []
    for c in sorted((c for c, v in cell_char.items() if v == "*"), key=lambda t: (-t[1], t[0])):
        x, y = c
        if c in flowers:
            spec = flowers[c]
            anchor_id, side = spec[0], spec[1]
            color = spec[2] if len(spec) > 2 else "blue"
        else:
            anchor_id = None
            side = None
            for (n, s) in (((x, y - 1), "up"), ((x, y + 1), "down"), ((x - 1, y), "right"), ((x + 1, y), "left")):
                if n in owner:
                    anchor_id, side = owner[n], s
                    break
            if anchor_id is None:
                raise ValueError(f"flower at {c} has no adjacent block to anchor to")
            color = "blue"
        flower_list.append(Flower(color=color, cell=c, anchor_block=anchor_id, anchor_side=side))

    level = Level(width, height, tuple(blocks), tuple(flower_list))
    problems = validate_level(level)
    if problems:
        raise ValueError("bad grid: " + "; ".join(problems))
    return level
