"""Template operations: vertical padding and port-row alignment."""

from __future__ import annotations

from dataclasses import replace

from ..engine import Block, Flower, Level
from .templates import GadgetTemplate, Port


class NotPaddable(Exception):
    pass


def insert_row(level: Level, row: int) -> Level:
    """Duplicate `row`: everything above shifts up, blocks crossing the row
    stretch.  The row must not contain flowers or colored blocks."""
    for f in level.flowers:
        if f.cell[1] == row:
            raise NotPaddable(f"flower at {f.cell} sits in pad row {row}")
    blocks = []
    for b in level.blocks:
        cells = set()
        for (x, y) in b.cells:
            if y <= row:
                cells.add((x, y))
            else:
                cells.add((x, y + 1))
            if y == row:
                cells.add((x, y + 1))
        if b.kind == "colored" and len(cells) != len(b.cells):
            raise NotPaddable(f"colored block {b.id} sits in pad row {row}")
        blocks.append(replace(b, cells=frozenset(cells)))
    flowers = tuple(
        replace(f, cell=(f.cell[0], f.cell[1] + 1)) if f.cell[1] > row else f
        for f in level.flowers
    )
    return Level(level.width, level.height + 1, tuple(blocks), flowers)


def _shift_port(p: Port, row: int) -> Port:
    def up(c):
        return (c[0], c[1] + 1) if c[1] > row else c

    return replace(
        p,
        row=p.row + 1 if p.row > row else p.row,
        mouth=up(p.mouth),
        park=up(p.park),
        commit=up(p.commit),
    )


def pad_once(t: GadgetTemplate, row: int) -> GadgetTemplate:
    if row not in t.pad_rows:
        raise NotPaddable(f"{row} is not a pad row of {t.name}")
    level = insert_row(t.level, row)
    ports = tuple(_shift_port(p, row) for p in t.ports)
    pads = []
    for p in t.pad_rows:
        if p < row:
            pads.append(p)
        elif p == row:
            pads.extend((row, row + 1))
        else:
            pads.append(p + 1)
    shifts = tuple(
        (pi, bid, dx, dy) for (pi, bid, dx, dy) in t.out_shifts
    )
    return replace(t, level=level, ports=ports, pad_rows=tuple(sorted(set(pads))), out_shifts=shifts)


def pad(t: GadgetTemplate, target_height: int) -> GadgetTemplate:
    """Stretch to target height by duplicating pad rows round-robin."""
    if target_height < t.height:
        raise NotPaddable("target height below current height")
    if target_height > t.height and not t.pad_rows:
        raise NotPaddable(f"{t.name} has no pad rows")
    i = 0
    while t.height < target_height:
        row = t.pad_rows[i % len(t.pad_rows)]
        t = pad_once(t, row)
        i += 1
    return t


def align_ports(t: GadgetTemplate, rows: dict, target_height: int = None) -> GadgetTemplate:
    """Pad so that each port (keyed by slot) sits at the given absolute row.

    Rows must preserve the template's slot order and not compress any gap.
    """
    want = dict(rows)
    while True:
        moved = False
        for p in sorted(t.ports, key=lambda p: p.row):
            target = want.get(p.slot)
            if target is None:
                continue
            if target < p.row:
                raise NotPaddable(
                    f"port slot {p.slot} of {t.name} is at row {p.row}, above target {target}"
                )
            if target > p.row:
                # duplicate a pad row strictly below this port but above any
                # lower port that is already in place
                lower = [q.row for q in t.ports if q.row < p.row]
                floor = max(lower) if lower else -1
                candidates = [r for r in t.pad_rows if floor < r < p.row]
                if not candidates:
                    raise NotPaddable(
                        f"{t.name}: no pad row available below port slot {p.slot}"
                    )
                t = pad_once(t, candidates[-1])
                moved = True
                break
        if not moved:
            break
    if target_height is not None:
        t = _pad_top(t, target_height)
    return t


def _pad_top(t: GadgetTemplate, target_height: int) -> GadgetTemplate:
    if target_height < t.height:
        raise NotPaddable("target height below current height")
    top_port = max(p.row for p in t.ports)
    candidates = [r for r in t.pad_rows if r > top_port]
    if target_height > t.height and not candidates:
        raise NotPaddable(f"{t.name}: no pad row above the top port")
    while t.height < target_height:
        row = [r for r in t.pad_rows if r > top_port][-1]
        t = pad_once(t, row)
    return t
