"""The reduction compiler: constraint-logic instances to puzzle levels.

Pipeline: visibility representation -> per-vertex signatures (from the
rows and sides at which edge segments meet the vertex segment) -> fetch
and stretch a gadget per vertex -> lay gadgets out in column bands in
st-order -> carve one-cell-tall tunnels along edge rows -> drop each
edge's block into the pocket of the vertex it points into -> neutralize
the target edge's trigger flower -> fill everything else with immovable
gray.  Malformed inputs map to one fixed unsolvable level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .engine import ARROW_DELTA, Block, Flower, Level, validate_level
from .gadgets.compose import MAKERS
from .gadgets.ops import align_ports
from .gadgets.registry import get_template
from .gadgets.templates import GadgetTemplate, compact_catalog
from .layout import NotPlanarEmbedding, validate_rep, visibility_rep
from .ncl import (
    InvalidInstance,
    NclInstance,
    decide_ncl,
    instance_from_json,
    validate_instance,
)
from .solver import SOLVABLE, UNKNOWN, UNSOLVABLE, SearchLimits, solve

GAP_X = 2


class TargetFlowerNotFound(Exception):
    pass


@dataclass
class PlacementPlan:
    scale: int
    row_base: int
    vertex_placements: dict  # vertex -> {...}
    tunnels: dict            # edge -> {...}
    target: str

    def to_dict(self):
        return {
            "scale": self.scale,
            "row_base": self.row_base,
            "vertex_placements": self.vertex_placements,
            "tunnels": self.tunnels,
            "target": self.target,
        }


@dataclass
class ReductionResult:
    level: Level
    plan: PlacementPlan


def _signature_of_vertex(graph, rep, v):
    vx = rep.vertex(v)[1]
    rows = []
    for (eid, u, w, weight) in graph.edges:
        if v not in (u, w):
            continue
        seg = rep.edge(eid)
        other = w if u == v else u
        side = "left" if rep.vertex(other)[1] < vx else "right"
        rows.append((seg[1], eid, side, weight))
    rows.sort(reverse=True)  # slot 1 = topmost
    left = ["."] * 3
    right = ["."] * 3
    slot_of = {}
    for slot, (_row, eid, side, weight) in enumerate(rows, start=1):
        ch = "B" if weight == 2 else "R"
        (left if side == "left" else right)[slot - 1] = ch
        slot_of[eid] = slot
    return "".join(left) + "|" + "".join(right), slot_of


def _template_for(sig: str) -> GadgetTemplate:
    compact = compact_catalog()
    if sig in compact:
        return compact[sig]
    return get_template(sig)


def _stretch(template: GadgetTemplate, rel_rows: dict):
    from .gadgets.compose import align_any

    return align_any(template, rel_rows)


def reduce_instance(inst: NclInstance) -> ReductionResult:
    problems = validate_instance(inst)
    if problems:
        raise InvalidInstance("; ".join(problems))
    graph = inst.graph
    rep = visibility_rep(graph)
    rep_problems = validate_rep(graph, rep)
    if rep_problems:
        raise NotPlanarEmbedding("; ".join(rep_problems))

    heads = inst.initial.as_dict()
    ends = {e[0]: (e[1], e[2]) for e in graph.edges}

    sigs = {}
    slots = {}
    templates = {}
    for (v, _t) in graph.vertices:
        sig, slot_of = _signature_of_vertex(graph, rep, v)
        sigs[v] = sig
        slots[v] = slot_of
        templates[v] = _template_for(sig)

    # vertical scale: enough room for the bulkiest template's port gaps
    spacing = 4
    margin_lo = 2
    margin_hi = 2
    for t in templates.values():
        rows = sorted(p.row for p in t.ports)
        for a, b in zip(rows, rows[1:]):
            spacing = max(spacing, b - a)
        margin_lo = max(margin_lo, rows[0])
        margin_hi = max(margin_hi, t.height - rows[-1])
    row_base = margin_lo + 2

    def tunnel_row(rep_row):
        return row_base + spacing * rep_row

    # stretch templates so ports land on their tunnel rows
    stretched = {}
    offsets_y = {}
    for (v, _t) in graph.vertices:
        t = templates[v]
        natural = {p.slot: p.row for p in t.ports}
        want_abs = {}
        for (eid, slot) in slots[v].items():
            want_abs[slot] = tunnel_row(rep.edge(eid)[1])
        oy = min(want_abs[s] - natural[s] for s in want_abs)
        rel = {s: r - oy for (s, r) in want_abs.items()}
        out, lift = _stretch(t, rel)
        oy -= lift
        if oy < 0:
            raise NotPlanarEmbedding(f"vertex {v}: gadget does not fit above the floor")
        stretched[v] = out
        offsets_y[v] = oy

    order = sorted(graph.vertex_ids(), key=lambda v: rep.vertex(v)[1])
    xs = {}
    x = 1
    for v in order:
        xs[v] = x
        x += stretched[v].width + GAP_X
    width = x - GAP_X + 1
    height = max(offsets_y[v] + stretched[v].height for v in order) + 2

    static = {(cx, cy) for cx in range(width) for cy in range(height)}
    blocks = []
    idmaps = {}
    for v in order:
        t = stretched[v]
        ox, oy = xs[v], offsets_y[v]
        idmap = {}
        for b in t.level.blocks:
            if b.kind == "immovable-gray":
                continue
            nid = f"{v}.{b.id}"
            idmap[b.id] = nid
            blocks.append(
                replace(b, id=nid, cells=frozenset((cx + ox, cy + oy) for (cx, cy) in b.cells))
            )
        idmaps[v] = idmap
        for cx in range(t.width):
            for cy in range(t.height):
                static.discard((cx + ox, cy + oy))
        for b in t.level.blocks:
            if b.kind == "immovable-gray":
                static.update((cx + ox, cy + oy) for (cx, cy) in b.cells)

    # canonical placement adjustments for ports whose edge points away
    for v in order:
        t = stretched[v]
        inside = set()
        for (eid, slot) in slots[v].items():
            head = ends[eid][1] if heads[eid] == "v" else ends[eid][0]
            if head == v:
                for pi, p in enumerate(t.ports):
                    if p.slot == slot:
                        inside.add(pi)
        mask = sum(1 << pi for pi in inside)
        shifts = {}
        for (pi, bid, dx, dy) in t.out_shifts:
            if pi not in inside:
                shifts[bid] = (dx, dy)
        for (m, moves) in t.rep_placements:
            if m == mask:
                for (bid, op, a, b) in moves:
                    if op == "shift":
                        shifts[bid] = (a, b)
                    else:
                        shifts[bid] = ("cell", a, b)
                break
        if not shifts:
            continue
        ox, oy = xs[v], offsets_y[v]
        for i, blk in enumerate(blocks):
            base_id = blk.id[len(f"{v}."):] if blk.id.startswith(f"{v}.") else None
            if base_id in shifts:
                mv = shifts[base_id]
                if mv[0] == "cell":
                    blocks[i] = replace(blk, cells=frozenset([(mv[1] + ox, mv[2] + oy)]))
                else:
                    dx, dy = mv
                    blocks[i] = replace(
                        blk, cells=frozenset((cx + dx, cy + dy) for (cx, cy) in blk.cells)
                    )

    # tunnels
    tunnels = {}
    portinfo = {v: {p.slot: p for p in stretched[v].ports} for v in order}
    for (eid, u, w, weight) in graph.edges:
        y = tunnel_row(rep.edge(eid)[1])
        west, east = (u, w) if xs[u] < xs[w] else (w, u)
        x1 = xs[west] + stretched[west].width
        x2 = xs[east] - 1
        for cx in range(x1, x2 + 1):
            static.discard((cx, y))
        head = ends[eid][1] if heads[eid] == "v" else ends[eid][0]
        park = portinfo[head][slots[head][eid]].park
        cell = (park[0] + xs[head], park[1] + offsets_y[head])
        blocks.append(
            Block(id=f"edge.{eid}", kind="colored", cells=frozenset([cell]), color="blue", arrow="up")
        )
        tunnels[eid] = {
            "row": y,
            "x_between": [x1, x2],
            "block_start": list(cell),
            "head": head,
        }

    comp_blocks, owner = _merge_static(static)
    flowers = []
    for v in order:
        t = stretched[v]
        ox, oy = xs[v], offsets_y[v]
        for f in t.level.flowers:
            cell = (f.cell[0] + ox, f.cell[1] + oy)
            if f.anchor_block in idmaps[v]:
                anchor = idmaps[v][f.anchor_block]
            else:
                dx, dy = ARROW_DELTA[f.anchor_side]
                anchor = owner.get((cell[0] - dx, cell[1] - dy))
                if anchor is None:
                    raise NotPlanarEmbedding(f"flower at {cell} lost its anchor")
            flowers.append(Flower(f.color, cell, anchor, f.anchor_side))

    level = Level(width, height, tuple(comp_blocks + blocks), tuple(flowers))

    placements = {}
    for v in order:
        t = stretched[v]
        placements[v] = {
            "signature": sigs[v],
            "template": t.name,
            "rect": [xs[v], offsets_y[v], t.width, t.height],
            "ports": {
                eid: {
                    "slot": slot,
                    "row": tunnel_row(rep.edge(eid)[1]),
                    "side": portinfo[v][slot].side,
                }
                for (eid, slot) in slots[v].items()
            },
        }
    plan = PlacementPlan(
        scale=spacing,
        row_base=row_base,
        vertex_placements=placements,
        tunnels=tunnels,
        target=inst.target_edge,
    )
    level = apply_target_modification(level, plan)
    problems = validate_level(level)
    if problems:
        raise NotPlanarEmbedding("reduced level invalid: " + "; ".join(problems))
    return ReductionResult(level, plan)


def _merge_static(static):
    blocks = []
    owner = {}
    seen = set()
    wi = 0
    for c in sorted(static):
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
            for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if nb in static and nb not in comp:
                    stack.append(nb)
        seen |= comp
        bid = f"W{wi}"
        wi += 1
        blocks.append(Block(id=bid, kind="immovable-gray", cells=frozenset(comp)))
        for cc in comp:
            owner[cc] = bid
    return blocks, owner


def apply_target_modification(level: Level, plan) -> Level:
    """Neutralize the flower that would bloom the target edge's block."""
    target = plan.target if hasattr(plan, "target") else plan["target"]
    tunnels = plan.tunnels if hasattr(plan, "tunnels") else plan["tunnels"]
    info = tunnels[target]
    cell = tuple(info["block_start"])
    # the trigger flower sits beside the commit cell, one step deeper than
    # the park; find the flower reachable from the parked block's row
    by_id = {b.id: b for b in level.blocks}
    candidates = []
    for f in level.flowers:
        fx, fy = f.cell
        if fy == cell[1] and abs(fx - cell[0]) <= 3:
            candidates.append(f)
        elif (fx, fy - 1) == cell or (fx, fy + 1) == cell:
            candidates.append(f)
    if not candidates:
        raise TargetFlowerNotFound(f"no trigger flower near {cell}")
    flower = min(candidates, key=lambda f: abs(f.cell[0] - cell[0]))
    anchor = by_id[flower.anchor_block]
    flowers = tuple(f for f in level.flowers if f is not flower)
    blocks = list(level.blocks)
    if anchor.kind == "immovable-gray":
        blocks.append(
            Block(id="target_fill", kind="immovable-gray", cells=frozenset([flower.cell]))
        )
    elif anchor.kind == "movable-gray" and len(anchor.cells) == 1 and flower.anchor_side == "up":
        blocks = [
            replace(b, cells=frozenset(list(b.cells) + [flower.cell])) if b.id == anchor.id else b
            for b in blocks
        ]
    else:
        raise TargetFlowerNotFound(
            f"trigger flower anchored to unsupported block kind {anchor.kind}"
        )
    return Level(level.width, level.height, tuple(blocks), flowers)


FIXED_UNSOLVABLE = Level(
    width=3,
    height=3,
    blocks=(
        Block("W0", "immovable-gray", frozenset(
            [(0, 0), (1, 0), (2, 0), (0, 1), (2, 1), (0, 2), (1, 2), (2, 2)]
        )),
        Block("b", "colored", frozenset([(1, 1)]), color="blue", arrow="up"),
    ),
)


def handle_malformed(data) -> Level:
    """Any non-instance maps to the fixed sealed-block level."""
    return FIXED_UNSOLVABLE


def reduce_or_fixed(data: bytes) -> ReductionResult:
    """Parse-and-reduce; malformed inputs yield the fixed unsolvable level."""
    try:
        text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
        inst = instance_from_json(text)
        return reduce_instance(inst)
    except Exception:
        return ReductionResult(
            handle_malformed(data),
            PlacementPlan(0, 0, {}, {}, ""),
        )


def cross_check(inst: NclInstance, limits: SearchLimits = None, strategy: str = "dfs") -> dict:
    limits = limits or SearchLimits(max_states=2_000_000, max_seconds=120)
    ncl_v = decide_ncl(inst, limits)
    result = reduce_instance(inst)
    han_v = solve(result.level, limits, strategy=strategy)
    definite = {SOLVABLE, UNSOLVABLE}
    if ncl_v.status in definite and han_v.status in definite:
        agree = ncl_v.status == han_v.status
    else:
        agree = "unknown"
    return {
        "ncl": ncl_v.to_dict(),
        "hanano": {"status": han_v.status, "stats": han_v.stats},
        "agree": agree,
        "level_area": result.level.width * result.level.height,
    }
