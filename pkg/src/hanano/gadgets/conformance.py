"""Exhaustive conformance checking of gadget templates.

A template is certified by attaching a test stub to every port (a pocket
outside the gadget where the port block can rest and, at the far end,
bloom), exploring the entire reachable state space, and checking:

  C1  inflow soundness: any reachable state whose port-occupancy
      projection has total in-weight below the template's minimum is
      doomed (no continuation blooms all signal blocks).
  C2  flip completeness: between the canonical parked states of any two
      legal projections differing in one port there is a move sequence
      that never blooms anything.
  C3  completion: every reachable non-doomed state with a legal
      projection has a continuation that blooms every colored block.

Port blocks in the harness are tracked by identity (no canonical-key
merging), which keeps the projection well defined.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..engine import Block, Flower, Level, Sim, validate_level
from ..solver import SearchLimits
from .templates import GadgetTemplate, Port

STUB_W = 4


class HarnessError(Exception):
    pass


@dataclass
class Harness:
    template: GadgetTemplate
    level: Level
    offset: int              # x shift applied to the fragment
    port_block_ids: tuple    # block id per port, index-aligned
    stub_parks: tuple        # park cell per port (outside)


def build_harness(template: GadgetTemplate, inside=None) -> Harness:
    """Assemble fragment + stubs; ports in `inside` start parked in-gadget."""
    t = template
    if inside is None:
        inside = set(range(len(t.ports)))
    has_left = any(p.side == "left" for p in t.ports)
    has_right = any(p.side == "right" for p in t.ports)
    off = STUB_W if has_left else 0
    width = off + t.width + (STUB_W if has_right else 0)
    height = t.height

    # carve stub interiors out of solid side walls: a park cell by the
    # mouth, a commit cell beside the stub flower, headroom for the bloom
    carved = set()
    stub_park = {}
    stub_flower = []
    for i, p in enumerate(t.ports):
        r = p.row
        if p.side == "left":
            cells = [(1, r), (2, r), (3, r), (2, r + 1)]
            stub_park[i] = (3, r)
            stub_flower.append(((1, r), (1, r - 1)))
        else:
            base = off + t.width
            cells = [(base, r), (base + 1, r), (base + 2, r), (base + 1, r + 1)]
            stub_park[i] = (base, r)
            stub_flower.append(((base + 2, r), (base + 2, r - 1)))
        carved.update(cells)

    static = set()
    for x in range(0, off):
        for y in range(height):
            if (x, y) not in carved:
                static.add((x, y))
    for x in range(off + t.width, width):
        for y in range(height):
            if (x, y) not in carved:
                static.add((x, y))
    for b in t.level.blocks:
        if b.kind == "immovable-gray":
            static.update((x + off, y) for (x, y) in b.cells)

    # merge immovable cells into connected components
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
            for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if n in static and n not in comp:
                    stack.append(n)
        seen |= comp
        bid = f"W{wi}"
        wi += 1
        blocks.append(Block(id=bid, kind="immovable-gray", cells=frozenset(comp)))
        for cc in comp:
            owner[cc] = bid

    shifts = {}
    retarget = {}
    for (pi, bid, dx, dy) in t.out_shifts:
        if pi not in inside:
            shifts[bid] = (shifts.get(bid, (0, 0))[0] + dx, shifts.get(bid, (0, 0))[1] + dy)
    mask = sum(1 << i for i in inside)
    for (m, moves) in t.rep_placements:
        if m == mask:
            for (bid, op, a, b) in moves:
                if op == "cell":
                    retarget[bid] = (a, b)
                else:
                    shifts[bid] = (shifts.get(bid, (0, 0))[0] + a, shifts.get(bid, (0, 0))[1] + b)
            break

    for b in t.level.blocks:
        if b.kind != "immovable-gray":
            if b.id in retarget:
                cells = frozenset([(retarget[b.id][0] + off, retarget[b.id][1])])
            else:
                sx, sy = shifts.get(b.id, (0, 0))
                cells = frozenset((x + off + sx, y + sy) for (x, y) in b.cells)
            blocks.append(
                Block(
                    id=b.id,
                    kind=b.kind,
                    cells=cells,
                    color=b.color,
                    arrow=b.arrow,
                    bloomed=b.bloomed,
                )
            )
            for cc in blocks[-1].cells:
                owner[cc] = b.id

    flowers = []
    from ..engine import ARROW_DELTA

    for f in t.level.flowers:
        fx, fy = shifts.get(f.anchor_block, (0, 0))
        cell = (f.cell[0] + off + fx, f.cell[1] + fy)
        if f.anchor_block.startswith("W"):
            dx, dy = ARROW_DELTA[f.anchor_side]
            anchor_cell = (cell[0] - dx, cell[1] - dy)
            anchor = owner.get(anchor_cell)
            if anchor is None:
                raise HarnessError(f"template flower at {cell} lost its anchor")
        else:
            anchor = f.anchor_block
        flowers.append(Flower(f.color, cell, anchor, f.anchor_side))
    for (fc, pc) in stub_flower:
        anchor = owner.get(pc)
        if anchor is None:
            raise HarnessError(f"stub flower at {fc} has no pedestal")
        flowers.append(Flower("blue", fc, anchor, "up"))

    ids = []
    for i, p in enumerate(t.ports):
        cell = (p.park[0] + off, p.park[1]) if i in inside else stub_park[i]
        bid = f"edge{i}"
        ids.append(bid)
        blocks.append(Block(id=bid, kind="colored", cells=frozenset([cell]), color="blue", arrow="up"))

    level = Level(width, height, tuple(blocks), tuple(flowers))
    problems = validate_level(level)
    if problems:
        raise HarnessError("bad harness: " + "; ".join(problems))
    return Harness(t, level, off, tuple(ids), tuple(stub_park[i] for i in range(len(t.ports))))


@dataclass
class ConformanceReport:
    template: str
    explored_states: int = 0
    c1_ok: bool = False
    c2_ok: bool = False
    c3_ok: bool = False
    complete: bool = True        # exploration finished within limits
    counterexample: object = None
    notes: list = field(default_factory=list)

    @property
    def certified(self):
        return self.complete and self.c1_ok and self.c2_ok and self.c3_ok

    def to_dict(self):
        return {
            "template": self.template,
            "explored_states": self.explored_states,
            "c1_ok": self.c1_ok,
            "c2_ok": self.c2_ok,
            "c3_ok": self.c3_ok,
            "complete": self.complete,
            "certified": self.certified,
            "counterexample": self.counterexample,
            "notes": self.notes,
        }


class _Space:
    """Fully explored reachable graph over identity-preserving states."""

    def __init__(self, sim, start, limits):
        self.sim = sim
        self.states = [start]
        self.index = {start: 0}
        self.succs = []
        self.parents = [None]
        self.complete = True
        t0 = time.monotonic()
        i = 0
        while i < len(self.states):
            if i % 256 == 0 and time.monotonic() - t0 > limits.max_seconds:
                self.complete = False
                break
            state = self.states[i]
            row = []
            for mv, nxt in sim.expand(state):
                j = self.index.get(nxt)
                if j is None:
                    j = len(self.states)
                    self.index[nxt] = j
                    self.states.append(nxt)
                    self.parents.append((i, mv))
                    if j > limits.max_states:
                        self.complete = False
                row.append(j)
            self.succs.append(row)
            if not self.complete:
                break
            i += 1
        while len(self.succs) < len(self.states):
            self.succs.append([])

    def backward_closure(self, seeds):
        preds = [[] for _ in self.states]
        for i, row in enumerate(self.succs):
            for j in row:
                preds[j].append(i)
        mark = bytearray(len(self.states))
        stack = []
        for i in seeds:
            if not mark[i]:
                mark[i] = 1
                stack.append(i)
        while stack:
            j = stack.pop()
            for i in preds[j]:
                if not mark[i]:
                    mark[i] = 1
                    stack.append(i)
        return mark

    def trace_to(self, i):
        moves = []
        cur = i
        while self.parents[cur] is not None:
            p, mv = self.parents[cur]
            moves.append(self.sim.move_to_public(mv))
            cur = p
        moves.reverse()
        return moves


def _legal_projections(template):
    """All port subsets whose in-weight meets the minimum inflow."""
    n = len(template.ports)
    out = []
    for mask in range(1 << n):
        w = sum(template.ports[i].weight for i in range(n) if mask >> i & 1)
        if w >= template.min_inflow:
            out.append(mask)
    return out


def conformance(template: GadgetTemplate, limits: SearchLimits = None) -> ConformanceReport:
    limits = limits or SearchLimits(max_states=2_000_000, max_seconds=300)
    rep = ConformanceReport(template=template.name)
    harness = build_harness(template)
    sim = Sim(harness.level)
    start = sim.normalize(sim.initial)
    shapes = sim.shapes
    if any(shapes.bloomed[sid] for (sid, _x, _y) in start):
        rep.notes.append("harness start state blooms spontaneously")
        return rep

    space = _Space(sim, start, limits)
    rep.explored_states = len(space.states)
    rep.complete = space.complete
    if not space.complete:
        rep.notes.append("state space exceeded limits")
        return rep

    port_idx = [sim.index_of[bid] for bid in harness.port_block_ids]
    frag_lo = harness.offset
    frag_hi = harness.offset + template.width
    weights = [p.weight for p in template.ports]

    def projection(state):
        mask = 0
        for k, mi in enumerate(port_idx):
            sid, ox, oy = state[mi]
            (dx, _dy) = shapes.block_cells[sid][0]
            if frag_lo <= ox + dx < frag_hi:
                mask |= 1 << k
        return mask

    def inflow(mask):
        return sum(weights[k] for k in range(len(weights)) if mask >> k & 1)

    sig_idx = [sim.index_of[bid] for bid in template.signal_blocks]
    colored_idx = [
        i
        for i, (sid, _x, _y) in enumerate(sim.initial)
        if shapes.kind[sid] == "C"
    ]

    def all_bloomed(state, idxs):
        return all(shapes.bloomed[state[i][0]] for i in idxs)

    sig_seeds = [i for i, s in enumerate(space.states) if all_bloomed(s, sig_idx)]
    all_seeds = [i for i, s in enumerate(space.states) if all_bloomed(s, colored_idx)]
    can_sig = space.backward_closure(sig_seeds)
    can_all = space.backward_closure(all_seeds)

    minw = template.min_inflow
    rep.c1_ok = True
    for i, s in enumerate(space.states):
        if inflow(projection(s)) < minw and can_sig[i]:
            rep.c1_ok = False
            rep.counterexample = {
                "criterion": "C1",
                "projection": projection(s),
                "trace_len": len(space.trace_to(i)),
            }
            rep.notes.append(f"C1: reachable inflow-violating state {i} is not doomed")
            break

    rep.c3_ok = True
    for i, s in enumerate(space.states):
        if inflow(projection(s)) >= minw and can_sig[i] and not can_all[i]:
            rep.c3_ok = False
            if rep.counterexample is None:
                rep.counterexample = {
                    "criterion": "C3",
                    "projection": projection(s),
                    "trace_len": len(space.trace_to(i)),
                }
            rep.notes.append(f"C3: legal non-doomed state {i} cannot complete all blooms")
            break

    # C2 over bloom-free subgraph between canonical parked states
    rep.c2_ok = True
    legal = _legal_projections(template)
    reps = {}
    for mask in legal:
        inside = {k for k in range(len(template.ports)) if mask >> k & 1}
        h2 = build_harness(template, inside=inside)
        sim2 = Sim(h2.level)
        st = sim2.normalize(sim2.initial)
        # same geometry, so the state tuple is directly comparable
        j = space.index.get(st)
        if j is None:
            rep.c2_ok = False
            rep.notes.append(f"C2: canonical state for projection {mask:b} unreachable")
            break
        if not can_sig[j]:
            rep.c2_ok = False
            rep.notes.append(f"C2: canonical state for projection {mask:b} is doomed")
            break
        reps[mask] = j
    if rep.c2_ok:
        bloom_free = bytearray(len(space.states))
        for i, s in enumerate(space.states):
            if not any(shapes.bloomed[sid] for (sid, _x, _y) in s):
                bloom_free[i] = 1
        from collections import deque

        def bf_reachable(a, b):
            if not (bloom_free[a] and bloom_free[b]):
                return False
            seen = {a}
            dq = deque([a])
            while dq:
                u = dq.popleft()
                if u == b:
                    return True
                for v in space.succs[u]:
                    if bloom_free[v] and v not in seen:
                        seen.add(v)
                        dq.append(v)
            return False

        for a in legal:
            for b in legal:
                if a < b and bin(a ^ b).count("1") == 1:
                    if not (bf_reachable(reps[a], reps[b]) and bf_reachable(reps[b], reps[a])):
                        rep.c2_ok = False
                        rep.notes.append(
                            f"C2: no bloom-free path between projections {a:b} and {b:b}"
                        )
                        break
            if not rep.c2_ok:
                break

    return rep


def bend_contract(template: GadgetTemplate, limits: SearchLimits = None) -> ConformanceReport:
    """Red-bend check: conformance at min-inflow 1, plus the biconditional
    that completing always involves a port block blooming inside."""
    rep = conformance(template, limits)
    if not rep.certified:
        return rep
    harness = build_harness(template)
    sim = Sim(harness.level)
    start = sim.normalize(sim.initial)
    space = _Space(sim, start, limits or SearchLimits(max_states=2_000_000, max_seconds=300))
    shapes = sim.shapes
    port_idx = [sim.index_of[bid] for bid in harness.port_block_ids]
    frag_lo, frag_hi = harness.offset, harness.offset + template.width
    colored_idx = [i for i, (sid, _, _) in enumerate(sim.initial) if shapes.kind[sid] == "C"]
    for s in space.states:
        if all(shapes.bloomed[s[i][0]] for i in colored_idx):
            ok = False
            for mi in port_idx:
                sid, ox, oy = s[mi]
                (dx, _dy) = shapes.block_cells[sid][0]
                if shapes.bloomed[sid] and frag_lo <= ox + dx < frag_hi:
                    ok = True
                    break
            if not ok:
                rep.c1_ok = False
                rep.notes.append("bend: a fully-bloomed state has no port block bloomed inside")
                break
    return rep
