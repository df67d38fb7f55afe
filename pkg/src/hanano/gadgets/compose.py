"""Schema composition: building vertex gadgets out of certified parts.

A schema places two or three sub-gadgets in west-to-east bands, joins
some of their facing ports with horizontal tunnels, terminates leftover
edges with terminator instances on the flanks, and exposes exactly three
ports as the composite's signature.  Corridors may pass above or below an
intervening instance (never through its rectangle).

Wirings are *derived by search*: candidate placements are screened for
row-order feasibility (each instance keeps its own top-to-bottom port
order, exposed ports must realize the target's slot order, and any
corridor crossing an instance must clear its whole rectangle), then for
constraint equivalence with the target vertex rule by enumerating every
orientation of the composite's edges.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

from ..engine import ARROW_DELTA, Block, Flower, Level, validate_level
from .ops import align_ports
from .templates import GadgetTemplate, Port, get_base, mirror_template, parse_signature

SLOT_SPACING = 13
BASE_ROW = 4
GAP = 1


class ComposeError(Exception):
    pass


class _PinsTooLow(ComposeError):
    def __init__(self, deficit):
        super().__init__(f"pinned rows too low by {deficit}")
        self.deficit = deficit


def _rule_of(template: GadgetTemplate) -> str:
    return "bend" if template.min_inflow == 1 else "vertex"


def _satisfied(rule: str, in_weight: int) -> bool:
    return in_weight >= (1 if rule == "bend" else 2)


@dataclass(frozen=True)
class Net:
    kind: str            # "exposed" | "internal" | "terminated"
    ends: tuple          # ((inst, slot),) or ((west_inst, slot), (east_inst, slot))
    target_slot: int = 0


@dataclass(frozen=True)
class Schema:
    target: str
    instances: tuple     # keys into the pool, west to east
    nets: tuple
    rows: tuple          # row per net, index-aligned with nets
    default_in: tuple    # for internal nets: 0 = west end holds the block


def _ports_of_sig(sig: str):
    left, right = parse_signature(sig)
    out = []
    for i in range(3):
        if left[i] != ".":
            out.append((i + 1, "left", 2 if left[i] == "B" else 1))
        if right[i] != ".":
            out.append((i + 1, "right", 2 if right[i] == "B" else 1))
    return out


def _crossed_instances(instances, templates, nets, ni):
    net = nets[ni]
    if net.kind == "internal":
        (wi, _), (ei, _) = net.ends
        return [i for i in range(len(instances)) if wi < i < ei]
    (inst, slot) = net.ends[0]
    side = _port_side(templates[inst], slot)
    return list(range(0, inst)) if side == "left" else list(range(inst + 1, len(instances)))


def _margins(t: GadgetTemplate):
    lo = min(p.row for p in t.ports)
    hi = max(p.row for p in t.ports)
    return lo, t.height - 1 - hi  # rows below lowest port, above highest


def _min_gap(t: GadgetTemplate, s_hi: int, s_lo: int) -> int:
    """Minimum row distance between two slots of a template (s_hi < s_lo)."""
    r = {p.slot: p.row for p in t.ports}
    return r[s_hi] - r[s_lo]


def _net_rows_ok(instances, templates, nets):
    """Choose net rows: a weighted DAG of 'must be above by at least w'
    constraints from instance slot orders, the target slot order, and
    corridor crossings (which must clear the crossed instance's whole
    rectangle).  Returns {net: row} or None."""
    n = len(nets)

    nets_of = [[] for _ in instances]
    for ni, net in enumerate(nets):
        for (inst, slot) in net.ends:
            nets_of[inst].append((slot, ni))
    for lst in nets_of:
        lst.sort()
        for (s1, _n1), (s2, _n2) in itertools.combinations(lst, 2):
            if s1 == s2:
                return None

    def base_edges():
        edges = {}  # (hi, lo) -> min distance

        def add(hi, lo, w):
            edges[(hi, lo)] = max(edges.get((hi, lo), 0), w)

        for inst, lst in enumerate(nets_of):
            for (s1, n1), (s2, n2) in itertools.combinations(lst, 2):
                add(n1, n2, _min_gap(templates[inst], s1, s2))
        exp = sorted(
            (net.target_slot, ni) for ni, net in enumerate(nets) if net.kind == "exposed"
        )
        for (_s1, n1), (_s2, n2) in itertools.combinations(exp, 2):
            add(n1, n2, 4)
        return edges

    crossings = []
    for ni in range(n):
        for i in _crossed_instances(instances, templates, nets, ni):
            if nets_of[i]:
                crossings.append((ni, i))

    floors = {}
    for ni, net in enumerate(nets):
        lo = BASE_ROW
        for (inst, slot) in net.ends:
            lo = max(lo, next(p.row for p in templates[inst].ports if p.slot == slot))
        floors[ni] = lo

    for branch in itertools.product((0, 1), repeat=len(crossings)):
        edges = base_edges()

        def add(hi, lo, w):
            edges[(hi, lo)] = max(edges.get((hi, lo), 0), w)

        ok = True
        for (ci, (ni, inst)) in enumerate(crossings):
            slots = nets_of[inst]
            lo_m, hi_m = _margins(templates[inst])
            top_net = slots[0][1]
            bot_net = slots[-1][1]
            if branch[ci] == 0:  # crossing net passes above the instance
                add(ni, top_net, hi_m + 2)
            else:  # below
                add(bot_net, ni, lo_m + 2)
        # cycle check via topological sort
        order = []
        remaining = set(range(n))
        while remaining:
            ready = sorted(
                i
                for i in remaining
                if not any((j, i) in edges for j in remaining if j != i)
            )
            if not ready:
                ok = False
                break
            order.append(ready[0])
            remaining.remove(ready[0])
        if not ok:
            continue
        rows = dict(floors)
        changed = True
        while changed:
            changed = False
            for (hi, lo), w in edges.items():
                need = rows[lo] + max(w, 4)
                if rows[hi] < need:
                    rows[hi] = need
                    changed = True
        return rows
    return None


def _port_side(t: GadgetTemplate, slot: int) -> str:
    return next(p.side for p in t.ports if p.slot == slot)


def _port_weight(t: GadgetTemplate, slot: int) -> int:
    return next(p.weight for p in t.ports if p.slot == slot)


def _orientations_ok(target_sig, templates, nets, min_inflow=2):
    """Check rule equivalence; return a default all-in orientation or None."""
    rules = [_rule_of(t) for t in templates]
    internal = [ni for ni, n in enumerate(nets) if n.kind == "internal"]
    exposed = sorted(
        (n.target_slot, ni) for ni, n in enumerate(nets) if n.kind == "exposed"
    )
    exposed = [ni for (_s, ni) in exposed]
    slot_w = {s: w for (s, _side, w) in _ports_of_sig(target_sig)}

    def instance_ok(inst, mask, assignment):
        w_in = 0
        for ni, net in enumerate(nets):
            for ei, (i2, slot) in enumerate(net.ends):
                if i2 != inst:
                    continue
                if net.kind == "exposed":
                    inside = bool(mask >> exposed.index(ni) & 1)
                elif net.kind == "terminated":
                    inside = False
                else:
                    inside = assignment[internal.index(ni)] == ei
                if inside:
                    w_in += _port_weight(templates[i2], slot)
        return _satisfied(rules[inst], w_in)

    def composite_legal(mask):
        for assignment in itertools.product((0, 1), repeat=len(internal)):
            if all(instance_ok(i, mask, assignment) for i in range(len(templates))):
                return assignment
        return None

    for mask in range(1 << len(exposed)):
        want = (
            sum(
                slot_w[nets[exposed[k]].target_slot]
                for k in range(len(exposed))
                if mask >> k & 1
            )
            >= min_inflow
        )
        got = composite_legal(mask) is not None
        if want != got:
            return None
    return composite_legal((1 << len(exposed)) - 1)


def schema_cost(schema: Schema, pool: dict) -> int:
    """Rough state-space proxy: corridor cells reachable by edge blocks."""
    templates = [pool[n] for n in schema.instances]
    cost = 8 * (len(templates) - 2)
    for ni, net in enumerate(schema.nets):
        if net.kind == "terminated":
            continue
        if net.kind == "internal":
            (wi, _), (ei, _) = net.ends
            cost += GAP + sum(templates[i].width for i in range(wi + 1, ei))
            continue
        (inst, slot) = net.ends[0]
        side = _port_side(templates[inst], slot)
        crossed = (
            range(0, inst) if side == "left" else range(inst + 1, len(templates))
        )
        cost += sum(templates[i].width + GAP for i in crossed)
    return cost


def derive_schema(target_sig: str, pool: dict, max_instances: int = 3) -> Schema:
    """Search pool combinations realizing target_sig; return the cheapest."""
    target_ports = _ports_of_sig(target_sig)
    names = list(pool)

    need = {}
    for (_s, side, w) in target_ports:
        need[(side, w)] = need.get((side, w), 0) + 1

    for count in (2, 3):
        if count > max_instances:
            break
        best = None
        found = 0
        for combo in itertools.product(names, repeat=count):
            templates = [pool[c] for c in combo]
            have = {}
            for t in templates:
                for p in t.ports:
                    have[(p.side, p.weight)] = have.get((p.side, p.weight), 0) + 1
            if any(have.get(k, 0) < n for (k, n) in need.items()):
                continue
            for result in _combo_candidates(target_sig, target_ports, combo, templates):
                c = schema_cost(result, pool)
                if best is None or c < best[0]:
                    best = (c, result)
                found += 1
                if count == 3 and found >= 40:
                    break
            if count == 3 and found >= 40:
                break
        if best is not None:
            return best[1]
    raise ComposeError(f"no schema found for {target_sig}")


def _combo_candidates(target_sig, target_ports, combo, templates):
    k = len(templates)
    # facing ports per interface
    rights = [[p.slot for p in t.ports if p.side == "right"] for t in templates]
    lefts = [[p.slot for p in t.ports if p.side == "left"] for t in templates]

    # choose order-preserving matchings at each adjacent interface
    interface_opts = []
    for i in range(k - 1):
        opts = []
        r = rights[i]
        l = lefts[i + 1]
        # at least one tunnel per interface keeps the composite connected
        for rn in range(1, min(len(r), len(l)) + 1):
            for rc in itertools.combinations(r, rn):
                for lc in itertools.combinations(l, rn):
                    opts.append(tuple(zip(rc, lc)))
        if not opts:
            return None
        interface_opts.append(opts)

    for matching in itertools.product(*interface_opts):
        used = set()
        nets = []
        for i, pairs in enumerate(matching):
            for (rs, ls) in pairs:
                nets.append(Net("internal", ((i, rs), (i + 1, ls))))
                used.add((i, rs))
                used.add((i + 1, ls))
        free = []
        for i, t in enumerate(templates):
            for p in t.ports:
                if (i, p.slot) not in used:
                    free.append((i, p.slot, p.side, p.weight))
        if len(free) < 3:
            continue
        # choose which free ports are exposed (3) mapped to target slots
        for exp_combo in itertools.permutations(free, 3):
            ok = True
            for (tslot, tside, tw), (i, slot, side, w) in zip(target_ports, exp_combo):
                if side != tside or w != tw:
                    ok = False
                    break
            if not ok:
                continue
            nets2 = list(nets)
            for (tslot, _ts, _tw), (i, slot, _side, _w) in zip(target_ports, exp_combo):
                nets2.append(Net("exposed", ((i, slot),), tslot))
            chosen = {(i, slot) for (i, slot, _s, _w) in exp_combo}
            for (i, slot, side, w) in free:
                if (i, slot) not in chosen:
                    nets2.append(Net("terminated", ((i, slot),)))
            nets2 = tuple(nets2)
            rows = _net_rows_ok(combo, templates, nets2)
            if rows is None:
                continue
            default = _orientations_ok(target_sig, templates, nets2)
            if default is None:
                continue
            yield Schema(
                target_sig,
                tuple(combo),
                nets2,
                tuple(rows[ni] for ni in range(len(nets2))),
                tuple(default),
            )


# -- geometry -----------------------------------------------------------------


# template name -> callable(slot_rows: dict, min_height) -> GadgetTemplate
# lets composites re-materialize at stretched rows instead of padding
MAKERS = {}


def _edges_from_schema(schema: Schema, templates):
    """Rebuild the 'hi must be >= lo + w' constraints, inferring the chosen
    crossing branches from the schema's stored rows."""
    nets = schema.nets
    nets_of = [[] for _ in templates]
    for ni, net in enumerate(nets):
        for (inst, slot) in net.ends:
            nets_of[inst].append((slot, ni))
    edges = {}

    def add(hi, lo, w):
        edges[(hi, lo)] = max(edges.get((hi, lo), 0), w)

    for inst, lst in enumerate(nets_of):
        lst.sort()
        for (s1, n1), (s2, n2) in itertools.combinations(lst, 2):
            add(n1, n2, _min_gap(templates[inst], s1, s2))
    exp = sorted((net.target_slot, ni) for ni, net in enumerate(nets) if net.kind == "exposed")
    for (_s1, n1), (_s2, n2) in itertools.combinations(exp, 2):
        add(n1, n2, 4)
    for ni in range(len(nets)):
        for i in _crossed_instances(schema.instances, templates, nets, ni):
            if not nets_of[i]:
                continue
            lo_m, hi_m = _margins(templates[i])
            top_net = nets_of[i][0][1]
            bot_net = nets_of[i][-1][1]
            if schema.rows[ni] > schema.rows[top_net]:
                add(ni, top_net, hi_m + 2)
            else:
                add(bot_net, ni, lo_m + 2)
    return edges


def _floor_rows(schema: Schema, templates):
    """Per-net lower bound: a port cannot sit below its template row."""
    out = {}
    for ni, net in enumerate(schema.nets):
        lo = BASE_ROW
        for (inst, slot) in net.ends:
            lo = max(lo, next(p.row for p in templates[inst].ports if p.slot == slot))
        out[ni] = lo
    return out


def _relax(edges, rows, pins):
    for _round in range(len(rows) * len(rows) + 3):
        changed = False
        for (hi, lo), w in edges.items():
            need = rows[lo] + max(w, 4)
            if rows[hi] < need:
                if hi in pins:
                    return None, need - rows[hi]
                rows[hi] = need
                changed = True
        if not changed:
            return rows, 0
    raise ComposeError("row constraints do not converge")


def _solve_rows(schema: Schema, templates, pins=None):
    edges = _edges_from_schema(schema, templates)
    floors = _floor_rows(schema, templates)
    pins = pins or {}
    # unpinned minima determine how far too low the pins are
    minimum, _d = _relax(edges, dict(floors), {})
    if pins:
        deficit = max(
            [0] + [minimum[ni] - pins[ni] for ni in pins if minimum[ni] > pins[ni]]
        )
        if deficit:
            raise _PinsTooLow(deficit)
    rows = {ni: max(floors[ni], pins.get(ni, floors[ni])) for ni in floors}
    rows.update(pins)
    solved, deficit = _relax(edges, rows, pins)
    if solved is None:
        raise _PinsTooLow(deficit)
    return solved


def align_any(t: GadgetTemplate, want: dict):
    """Align a template's ports to the given rows; returns (template, lift)
    where lift > 0 means the ports actually sit `lift` rows higher than
    requested (the caller lowers its placement by the same amount)."""
    maker = MAKERS.get(t.name)
    if maker is None:
        return align_ports(t, want), 0
    lift = 0
    for _ in range(6):
        try:
            return maker({s: r + lift for (s, r) in want.items()}, None), lift
        except _PinsTooLow as e:
            lift += e.deficit
    raise ComposeError("could not align composite instance")


def _align_instance(t: GadgetTemplate, want: dict) -> GadgetTemplate:
    out, lift = align_any(t, want)
    if lift:
        raise ComposeError("instance needs more room below its lowest port")
    return out


def materialize(schema: Schema, pool: dict, name=None, pins=None, min_height=None) -> GadgetTemplate:
    templates = [pool[n] for n in schema.instances]
    nets = schema.nets
    if pins is None:
        nrows = {ni: schema.rows[ni] for ni in range(len(nets))}
    else:
        nrows = _solve_rows(schema, templates, pins)

    aligned = []
    inst_y = []
    for i, t in enumerate(templates):
        trow = {p.slot: p.row for p in t.ports}
        want_abs = {}
        for ni, net in enumerate(nets):
            for (i2, slot) in net.ends:
                if i2 == i:
                    want_abs[slot] = nrows[ni]
        oy = min(want_abs[s] - trow[s] for s in want_abs)
        out, lift = align_any(t, {s: r - oy for (s, r) in want_abs.items()})
        oy -= lift
        if oy < 0:
            raise ComposeError(f"instance {i} does not fit above the floor")
        aligned.append(out)
        inst_y.append(oy)

    # terminated edges are realized by sealing the mouth: the edge block is
    # parked inside the pocket for good, the gadget's own latch does the rest
    height = max(
        [aligned[i].height + inst_y[i] for i in range(len(aligned))]
        + [max(nrows.values()) + 3]
        + ([min_height] if min_height else [])
    ) + 2  # blank cap rows double as pad rows

    x = 0
    inst_x = []
    for i, t in enumerate(aligned):
        inst_x.append(x)
        x += t.width + (GAP if i + 1 < len(aligned) else 0)
    width = x

    rects = [
        (inst_x[i], aligned[i].width, inst_y[i], inst_y[i] + aligned[i].height)
        for i in range(len(aligned))
    ]

    def crosses(ni, row, x1, x2):
        for i, (rx, rw, ry, rtop) in enumerate(rects):
            if x1 < rx + rw and x2 >= rx:
                owns = any(i2 == i for (i2, _s) in nets[ni].ends)
                if not owns and ry <= row < rtop:
                    raise ComposeError(
                        f"net {ni} row {row} crosses instance {i} rectangle"
                    )

    static = {(cx, cy) for cx in range(width) for cy in range(height)}
    blocks = []
    idmaps = []
    placed = []
    for i, t in enumerate(aligned):
        imm, idmap = _blit(blocks, t, inst_x[i], inst_y[i], f"g{i}_")
        idmaps.append(idmap)
        placed.append((t, inst_x[i], inst_y[i], idmap))
        for cx in range(t.width):
            for cy in range(t.height):
                static.discard((cx + inst_x[i], cy + inst_y[i]))
        static.update(imm)

    edge_blocks = []
    internal_list = [ni for ni, n in enumerate(nets) if n.kind == "internal"]
    for ni, net in enumerate(nets):
        row = nrows[ni]
        if net.kind == "internal":
            (wi, ws), (ei, es) = net.ends
            x1 = inst_x[wi] + aligned[wi].width
            x2 = inst_x[ei] - 1
            crosses(ni, row, x1, x2)
            for cx in range(x1, x2 + 1):
                static.discard((cx, row))
            into_west = schema.default_in[internal_list.index(ni)] == 0
            host, slot = (wi, ws) if into_west else (ei, es)
            park = next(p.park for p in aligned[host].ports if p.slot == slot)
            edge_blocks.append((f"ie{ni}", (park[0] + inst_x[host], park[1] + inst_y[host])))
        elif net.kind == "terminated":
            # sealed mouth, no corridor, no block: the edge points into the
            # terminator for good, so this gadget never gets its inflow
            pass
        else:
            (inst, slot) = net.ends[0]
            if _port_side(aligned[inst], slot) == "left":
                x1, x2 = 0, inst_x[inst] - 1
            else:
                x1, x2 = inst_x[inst] + aligned[inst].width, width - 1
            crosses(ni, row, x1, x2)
            for cx in range(x1, x2 + 1):
                static.discard((cx, row))

    for (bid, cell) in edge_blocks:
        blocks.append(
            Block(id=bid, kind="colored", cells=frozenset([cell]), color="blue", arrow="up")
        )

    comp_blocks, owner = _merge_static(static)
    all_blocks = comp_blocks + blocks

    flowers = []
    for (t, ox, oy, idmap) in placed:
        for f in t.level.flowers:
            cell = (f.cell[0] + ox, f.cell[1] + oy)
            if f.anchor_block in idmap:
                anchor = idmap[f.anchor_block]
            else:
                dx, dy = ARROW_DELTA[f.anchor_side]
                anchor = owner.get((cell[0] - dx, cell[1] - dy))
                if anchor is None:
                    raise ComposeError(f"flower at {cell} lost its static anchor")
            flowers.append(Flower(f.color, cell, anchor, f.anchor_side))

    level = Level(width, height, tuple(all_blocks), tuple(flowers))
    problems = validate_level(level)
    if problems:
        raise ComposeError("bad composite: " + "; ".join(problems))

    ports = []
    for ni, net in enumerate(nets):
        if net.kind != "exposed":
            continue
        (inst, slot) = net.ends[0]
        p = next(p for p in aligned[inst].ports if p.slot == slot)
        ox, oy = inst_x[inst], inst_y[inst]
        mouth = (0, nrows[ni]) if p.side == "left" else (width - 1, nrows[ni])
        ports.append(
            Port(
                net.target_slot,
                p.side,
                p.weight,
                nrows[ni],
                mouth,
                (p.park[0] + ox, p.park[1] + oy),
                (p.commit[0] + ox, p.commit[1] + oy),
            )
        )
    ports.sort(key=lambda p: p.slot)

    out_shifts = []
    for ci, port in enumerate(ports):
        net = next(n for n in nets if n.kind == "exposed" and n.target_slot == port.slot)
        (inst, slot) = net.ends[0]
        sub = aligned[inst]
        for (pi, bid, dx, dy) in sub.out_shifts:
            if sub.ports[pi].slot == slot:
                out_shifts.append((ci, idmaps[inst][bid], dx, dy))

    rep_placements = _rep_placements(schema, aligned, nets, inst_x, inst_y, idmaps, ports)

    signals = []
    for i, t in enumerate(aligned):
        signals.extend(idmaps[i][s] for s in t.signal_blocks)
    for (tt, _ox, _oy, idmap) in placed[len(aligned):]:
        signals.extend(idmap[s] for s in tt.signal_blocks)

    solid = {c for b in comp_blocks for c in b.cells}
    pad_rows = tuple(
        y for y in range(height) if all((cx, y) in solid for cx in range(width))
    )

    key = f"mk{len(MAKERS)}_{schema.target.replace('|', '_').replace('.', 'o')}"
    result = GadgetTemplate(
        name=name or "composite_" + schema.target.replace("|", "_").replace(".", "o"),
        signature=schema.target,
        level=level,
        ports=tuple(ports),
        pad_rows=pad_rows,
        signal_blocks=tuple(signals),
        out_shifts=tuple(out_shifts),
        rep_placements=rep_placements,
        maker_key=key,
    )
    slot_net = {n.target_slot: ni for ni, n in enumerate(nets) if n.kind == "exposed"}

    def _maker(slot_rows, mh, _s=schema, _p=pool, _n=result.name, _sn=slot_net, _k=key):
        pins = {_sn[s]: r for (s, r) in slot_rows.items()}
        out = materialize(_s, _p, name=_n, pins=pins, min_height=mh)
        return replace(out, maker_key=_k)

    MAKERS[key] = _maker
    return result


def _blit(blocks_out, t: GadgetTemplate, ox, oy, prefix):
    imm = set()
    idmap = {}
    for b in t.level.blocks:
        if b.kind == "immovable-gray":
            imm.update((x + ox, y + oy) for (x, y) in b.cells)
        else:
            nid = prefix + b.id
            idmap[b.id] = nid
            blocks_out.append(
                replace(b, id=nid, cells=frozenset((x + ox, y + oy) for (x, y) in b.cells))
            )
    return imm, idmap


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


def _rep_placements(schema, aligned, nets, inst_x, inst_y, idmaps, ports):
    internal = [ni for ni, n in enumerate(nets) if n.kind == "internal"]
    if not internal:
        return ()
    exposed = sorted(
        (n.target_slot, ni) for ni, n in enumerate(nets) if n.kind == "exposed"
    )
    exposed = [ni for (_s, ni) in exposed]
    rules = [_rule_of(t) for t in aligned]

    def instance_ok(inst, mask, assignment):
        w_in = 0
        for ni, net in enumerate(nets):
            for ei, (i2, slot) in enumerate(net.ends):
                if i2 != inst:
                    continue
                if net.kind == "exposed":
                    inside = bool(mask >> exposed.index(ni) & 1)
                elif net.kind == "terminated":
                    inside = False
                else:
                    inside = assignment[internal.index(ni)] == ei
                if inside:
                    w_in += _port_weight(aligned[i2], slot)
        return _satisfied(rules[inst], w_in)

    port_weights = [p.weight for p in ports]
    out = []
    for mask in range(1 << len(exposed)):
        if sum(port_weights[kk] for kk in range(len(exposed)) if mask >> kk & 1) < 2:
            continue
        found = None
        for assignment in itertools.product((0, 1), repeat=len(internal)):
            if all(instance_ok(i, mask, assignment) for i in range(len(aligned))):
                found = assignment
                break
        if found is None:
            continue
        moves = []
        for j, ni in enumerate(internal):
            (wi, ws), (ei, es) = nets[ni].ends
            host, slot = (wi, ws) if found[j] == 0 else (ei, es)
            park = next(p.park for p in aligned[host].ports if p.slot == slot)
            moves.append((f"ie{ni}", "cell", park[0] + inst_x[host], park[1] + inst_y[host]))
        # per-instance canonical adjustments (shuttles, nested composites)
        for i, sub in enumerate(aligned):
            sub_mask = 0
            outer_exposed_slots = set()
            for pi, p in enumerate(sub.ports):
                inside = False
                for ni, net in enumerate(nets):
                    for ei, (i2, slot) in enumerate(net.ends):
                        if i2 != i or slot != p.slot:
                            continue
                        if net.kind == "exposed":
                            inside = bool(mask >> exposed.index(ni) & 1)
                            outer_exposed_slots.add(p.slot)
                        elif net.kind == "terminated":
                            inside = False
                        else:
                            inside = found[internal.index(ni)] == ei
                if inside:
                    sub_mask |= 1 << pi
            for (pi, bid, dx, dy) in sub.out_shifts:
                p = sub.ports[pi]
                if p.slot in outer_exposed_slots:
                    continue  # outer out_shifts handles exposed ports
                if not (sub_mask >> pi & 1):
                    moves.append((idmaps[i][bid], "shift", dx, dy))
            for (m, mvs) in sub.rep_placements:
                if m == sub_mask:
                    for (bid, op, a, b) in mvs:
                        nid = idmaps[i][bid]
                        if op == "cell":
                            moves.append((nid, "cell", a + inst_x[i], b + inst_y[i]))
                        else:
                            moves.append((nid, "shift", a, b))
                    break
        out.append((mask, tuple(moves)))
    return tuple(out)
