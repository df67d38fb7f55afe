"""Constraint-logic graphs: model, validation, flips, and decision search.

A graph is cubic with red (weight 1) and blue (weight 2) edges; each
vertex is AND (one blue, two red) or OR (three blue).  An orientation is
legal when every vertex's incoming weight is at least two, and the only
move is reversing one edge subject to that constraint.  Deciding whether
a target edge can ever be reversed is done by breadth-first search over
orientations.

Embeddings are rotation systems (cyclic edge order per vertex) validated
with Euler's formula; planarity testing proper is out of scope.
"""

from __future__ import annotations

import itertools
import json
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .solver import SearchLimits, SOLVABLE, UNSOLVABLE, UNKNOWN

RED, BLUE = 1, 2


class InvalidInstance(Exception):
    pass


@dataclass(frozen=True)
class NclGraph:
    vertices: tuple      # of (id, vtype) with vtype in {"AND", "OR"}
    edges: tuple         # of (id, u, v, weight)
    rotation: tuple      # of (vertex id, (edge ids in cyclic order))

    def vertex_ids(self):
        return [v for (v, _t) in self.vertices]

    def vtype(self, v):
        for (w, t) in self.vertices:
            if w == v:
                return t
        raise KeyError(v)

    def edge(self, eid):
        for e in self.edges:
            if e[0] == eid:
                return e
        raise KeyError(eid)

    def incident(self, v):
        return [e for e in self.edges if e[1] == v or e[2] == v]


@dataclass(frozen=True)
class Orientation:
    """Per-edge head assignment: maps edge id to 'u' or 'v'."""
    heads: tuple  # of (edge id, "u"|"v")

    def head_of(self, eid):
        for (e, h) in self.heads:
            if e == eid:
                return h
        raise KeyError(eid)

    def as_dict(self):
        return dict(self.heads)


@dataclass(frozen=True)
class NclInstance:
    graph: NclGraph
    initial: Orientation
    target_edge: str


def inflow(graph: NclGraph, heads: dict, v) -> int:
    total = 0
    for (eid, u, w, weight) in graph.edges:
        head = w if heads[eid] == "v" else u
        if head == v:
            total += weight
    return total


def validate_graph(graph: NclGraph) -> list:
    problems = []
    ids = [v for (v, _t) in graph.vertices]
    if len(set(ids)) != len(ids):
        problems.append("duplicate vertex ids")
    vtypes = dict(graph.vertices)
    for (v, t) in graph.vertices:
        if t not in ("AND", "OR"):
            problems.append(f"vertex {v}: unknown type {t!r}")
    eids = [e[0] for e in graph.edges]
    if len(set(eids)) != len(eids):
        problems.append("duplicate edge ids")
    seen_pairs = set()
    for (eid, u, v, w) in graph.edges:
        if u == v:
            problems.append(f"edge {eid}: loop at {u}")
        if u not in vtypes or v not in vtypes:
            problems.append(f"edge {eid}: unknown endpoint")
            continue
        pair = frozenset((u, v))
        if pair in seen_pairs:
            problems.append(f"edge {eid}: parallel edge {u}-{v}")
        seen_pairs.add(pair)
        if w not in (RED, BLUE):
            problems.append(f"edge {eid}: weight must be 1 or 2")
    for (v, t) in graph.vertices:
        inc = graph.incident(v)
        if len(inc) != 3:
            problems.append(f"vertex {v}: degree {len(inc)}, want 3")
            continue
        blues = sum(1 for e in inc if e[3] == BLUE)
        if t == "OR" and blues != 3:
            problems.append(f"vertex {v}: OR vertex needs three blue edges")
        if t == "AND" and blues != 1:
            problems.append(f"vertex {v}: AND vertex needs one blue and two red edges")
    problems.extend(_check_embedding(graph))
    return problems


def _check_embedding(graph: NclGraph) -> list:
    problems = []
    rot = dict(graph.rotation)
    vtypes = dict(graph.vertices)
    if set(rot) != set(vtypes):
        problems.append("rotation must cover every vertex exactly once")
        return problems
    for v, order in rot.items():
        want = sorted(e[0] for e in graph.incident(v))
        if sorted(order) != want:
            problems.append(f"rotation at {v} does not list its incident edges")
            return problems
    # face traversal: darts (edge, endpoint-side); next dart = rotate at head
    darts = {}
    for (eid, u, v, _w) in graph.edges:
        darts[(eid, u)] = v  # dart from u toward v
        darts[(eid, v)] = u
    def next_dart(dart):
        eid, tail = dart
        head = darts[(eid, tail)]
        order = rot[head]
        i = order.index(eid)
        nxt = order[(i + 1) % len(order)]
        return (nxt, head)
    left = set(darts)
    faces = 0
    while left:
        d0 = next(iter(left))
        d = d0
        while True:
            left.discard(d)
            d = next_dart(d)
            if d == d0:
                break
        faces += 1
    comps = _component_count(graph)
    V = len(graph.vertices)
    E = len(graph.edges)
    if V - E + faces != 2 * comps:
        problems.append(
            f"rotation system is not planar: V-E+F = {V}-{E}+{faces} != 2x{comps} components"
        )
    return problems


def _component_count(graph: NclGraph) -> int:
    ids = graph.vertex_ids()
    adj = {v: [] for v in ids}
    for (_e, u, v, _w) in graph.edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = set()
    comps = 0
    for v in ids:
        if v in seen:
            continue
        comps += 1
        stack = [v]
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(adj[cur])
    return comps


def validate_instance(inst: NclInstance) -> list:
    problems = validate_graph(inst.graph)
    heads = inst.initial.as_dict()
    eids = {e[0] for e in inst.graph.edges}
    if set(heads) != eids:
        problems.append("initial orientation must cover every edge exactly once")
        return problems
    for (eid, h) in inst.initial.heads:
        if h not in ("u", "v"):
            problems.append(f"edge {eid}: head must be 'u' or 'v'")
    for (v, _t) in inst.graph.vertices:
        flow = inflow(inst.graph, heads, v)
        if flow < 2:
            problems.append(f"vertex {v}: inflow {flow} < 2 in the initial orientation")
    if inst.target_edge not in eids:
        problems.append(f"target edge {inst.target_edge!r} does not exist")
    return problems


def legal_flips(graph: NclGraph, heads: dict) -> list:
    """Edge ids whose reversal keeps every inflow at 2 or more."""
    out = []
    for (eid, u, v, w) in graph.edges:
        old_head = v if heads[eid] == "v" else u
        flow = inflow(graph, heads, old_head)
        if flow - w >= 2:
            out.append(eid)
    return out


def decide_ncl(inst: NclInstance, limits: SearchLimits = SearchLimits()) -> "NclVerdict":
    problems = validate_instance(inst)
    if problems:
        raise InvalidInstance("; ".join(problems))
    graph = inst.graph
    eids = [e[0] for e in graph.edges]
    eindex = {e: i for i, e in enumerate(eids)}
    weights = {e[0]: e[3] for e in graph.edges}
    heads0 = inst.initial.as_dict()
    ti = eindex[inst.target_edge]

    # precompute per-edge endpoints and per-vertex incident lists
    ends = {e[0]: (e[1], e[2]) for e in graph.edges}
    verts = graph.vertex_ids()
    vindex = {v: i for i, v in enumerate(verts)}
    incident = [[] for _ in verts]
    for (eid, u, v, w) in graph.edges:
        incident[vindex[u]].append((eindex[eid], w, 0))
        incident[vindex[v]].append((eindex[eid], w, 1))

    def pack(heads):
        mask = 0
        for eid, h in heads.items():
            if h == "v":
                mask |= 1 << eindex[eid]
        return mask

    def inflow_of(mask, vi):
        total = 0
        for (ei, w, side) in incident[vi]:
            headside = (mask >> ei) & 1
            if headside == side:
                total += w
        return total

    m0 = pack(heads0)
    t0 = time.monotonic()
    parents = {m0: None}
    frontier = deque([m0])
    explored = 0
    found = None
    while frontier:
        if explored % 1024 == 0 and time.monotonic() - t0 > limits.max_seconds:
            return NclVerdict(UNKNOWN, stats=_stats(explored, len(parents), t0))
        mask = frontier.popleft()
        explored += 1
        if (mask >> ti) & 1 != (m0 >> ti) & 1:
            found = mask
            break
        for (eid, u, v, w) in graph.edges:
            ei = eindex[eid]
            head_v = (mask >> ei) & 1
            head = v if head_v else u
            if inflow_of(mask, vindex[head]) - w < 2:
                continue
            nxt = mask ^ (1 << ei)
            if nxt in parents:
                continue
            parents[nxt] = (mask, eid)
            frontier.append(nxt)
            if len(parents) > limits.max_states:
                return NclVerdict(UNKNOWN, stats=_stats(explored, len(parents), t0))
    if found is None:
        return NclVerdict(UNSOLVABLE, stats=_stats(explored, len(parents), t0))
    flips = []
    cur = parents[found]
    while cur is not None:
        pk, eid = cur
        flips.append(eid)
        cur = parents[pk]
    flips.reverse()
    return NclVerdict(SOLVABLE, trace=flips, stats=_stats(explored, len(parents), t0))


@dataclass
class NclVerdict:
    status: str
    trace: Optional[list] = None
    stats: dict = field(default_factory=dict)

    @property
    def solvable(self):
        return self.status == SOLVABLE

    def to_dict(self):
        d = {"status": self.status, "stats": self.stats}
        if self.trace is not None:
            d["trace"] = list(self.trace)
        return d


def _stats(explored, states, t0):
    return {
        "states_explored": states,
        "expanded": explored,
        "elapsed": round(time.monotonic() - t0, 6),
    }


# -- JSON format ---------------------------------------------------------------


def instance_to_dict(inst: NclInstance) -> dict:
    return {
        "vertices": [{"id": v, "vtype": t} for (v, t) in inst.graph.vertices],
        "edges": [
            {"id": e, "u": u, "v": v, "weight": w} for (e, u, v, w) in inst.graph.edges
        ],
        "rotation": {v: list(order) for (v, order) in inst.graph.rotation},
        "initial": dict(inst.initial.heads),
        "target_edge": inst.target_edge,
    }


def instance_from_dict(d: dict) -> NclInstance:
    graph = NclGraph(
        vertices=tuple((str(v["id"]), v["vtype"]) for v in d["vertices"]),
        edges=tuple(
            (str(e["id"]), str(e["u"]), str(e["v"]), int(e["weight"])) for e in d["edges"]
        ),
        rotation=tuple(
            (str(v), tuple(str(e) for e in order)) for (v, order) in d["rotation"].items()
        ),
    )
    initial = Orientation(tuple(sorted((str(e), h) for (e, h) in d["initial"].items())))
    return NclInstance(graph, initial, str(d["target_edge"]))


def instance_to_json(inst: NclInstance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2, sort_keys=True)


def instance_from_json(text: str) -> NclInstance:
    return instance_from_dict(json.loads(text))


# -- enumeration of small instances ---------------------------------------------


def _cubic_graphs(n):
    """All simple 3-regular graphs on labeled vertices 0..n-1, deduplicated
    up to isomorphism (brute force, fine for n <= 8)."""
    if n % 2 or n < 4:
        return []
    verts = list(range(n))
    out = []
    seen_canon = set()

    def backtrack(deg, edges, start):
        if all(d == 3 for d in deg):
            canon = _canonical_edges(n, edges)
            if canon not in seen_canon:
                seen_canon.add(canon)
                out.append(list(edges))
            return
        # lowest-index vertex with open degree
        v = min(i for i in verts if deg[i] < 3)
        for w in range(v + 1, n):
            if deg[w] < 3 and (v, w) not in edges:
                deg[v] += 1
                deg[w] += 1
                edges.append((v, w))
                backtrack(deg, edges, start)
                edges.pop()
                deg[v] -= 1
                deg[w] -= 1

    backtrack([0] * n, [], 0)
    return out


def _canonical_edges(n, edges):
    best = None
    es = [tuple(e) for e in edges]
    for perm in itertools.permutations(range(n)):
        mapped = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for (u, v) in es))
        if best is None or mapped < best:
            best = mapped
    return best


def _plane_embedding(n, edges):
    """Brute-force rotation systems for a cubic graph (two cyclic orders per
    vertex); return one satisfying Euler's formula, or None."""
    incident = [[] for _ in range(n)]
    for i, (u, v) in enumerate(edges):
        incident[u].append(i)
        incident[v].append(i)
    orders = []
    for v in range(n):
        a, b, c = incident[v]
        orders.append([(a, b, c), (a, c, b)])
    E = len(edges)
    for combo in itertools.product(*(range(2) for _ in range(n))):
        rot = {v: orders[v][combo[v]] for v in range(n)}
        darts = {}
        for i, (u, v) in enumerate(edges):
            darts[(i, u)] = v
            darts[(i, v)] = u
        left = set(darts)
        faces = 0
        while left:
            d0 = next(iter(left))
            d = d0
            while True:
                left.discard(d)
                eid, tail = d
                head = darts[(eid, tail)]
                order = rot[head]
                i = order.index(eid)
                d = (order[(i + 1) % 3], head)
                if d == d0:
                    break
            faces += 1
        if n - E + faces == 2:
            return rot
    return None


def _colorings(n, edges):
    """Red/blue weightings where every vertex is AND or OR, up to graph
    automorphism x color: red subgraphs are disjoint cycles."""
    E = len(edges)
    out = []
    seen = set()
    autos = _automorphisms(n, edges)
    for mask in range(1 << E):  # bit set = red
        deg_red = [0] * n
        ok = True
        for i, (u, v) in enumerate(edges):
            if mask >> i & 1:
                deg_red[u] += 1
                deg_red[v] += 1
        for v in range(n):
            if deg_red[v] not in (0, 2):
                ok = False
                break
        if not ok:
            continue
        canon = min(_map_mask(mask, edges, perm) for perm in autos)
        if canon in seen:
            continue
        seen.add(canon)
        out.append(mask)
    return out


def _automorphisms(n, edges):
    eset = {frozenset(e) for e in edges}
    autos = []
    for perm in itertools.permutations(range(n)):
        if all(frozenset((perm[u], perm[v])) in eset for (u, v) in edges):
            autos.append(perm)
    return autos


def _map_mask(mask, edges, perm):
    lookup = {frozenset(e): (mask >> i) & 1 for i, e in enumerate(edges)}
    bits = 0
    for i, (u, v) in enumerate(edges):
        if lookup[frozenset((perm[u], perm[v]))]:
            bits |= 1 << i
    return bits


def enumerate_small_instances(max_vertices: int):
    """Yield non-isomorphic valid planar AND/OR instances up to the bound.

    Isomorphism reduction: graphs up to iso; colorings up to automorphism;
    (orientation, target edge) pairs up to automorphisms of the colored
    graph.  Every emitted instance passes validate_instance.
    """
    if max_vertices > 8:
        raise ValueError("enumeration supported up to 8 vertices")
    for n in range(4, max_vertices + 1, 2):
        for edges in _cubic_graphs(n):
            rot = _plane_embedding(n, edges)
            if rot is None:
                continue
            autos = _automorphisms(n, edges)
            for color_mask in _colorings(n, edges):
                color_autos = [
                    p for p in autos if _map_mask(color_mask, edges, p) == color_mask
                ]
                yield from _instances_for_coloring(n, edges, rot, color_mask, color_autos)


def _instances_for_coloring(n, edges, rot, color_mask, autos):
    E = len(edges)
    weights = [(RED if color_mask >> i & 1 else BLUE) for i in range(E)]
    vtypes = []
    for v in range(n):
        reds = sum(
            1 for i, (a, b) in enumerate(edges) if v in (a, b) and weights[i] == RED
        )
        vtypes.append("AND" if reds == 2 else "OR")

    def inflow_ok(mask):
        flow = [0] * n
        for i, (u, v) in enumerate(edges):
            head = v if mask >> i & 1 else u
            flow[head] += weights[i]
        return all(f >= 2 for f in flow)

    def orient_map(mask, perm):
        # permute vertices; edge orientation follows
        lookup = {}
        for i, (u, v) in enumerate(edges):
            head = v if mask >> i & 1 else u
            lookup[frozenset((perm[u], perm[v]))] = perm[head]
        bits = 0
        for i, (u, v) in enumerate(edges):
            if lookup[frozenset((u, v))] == v:
                bits |= 1 << i
        return bits

    seen_pairs = set()
    for mask in range(1 << E):
        if not inflow_ok(mask):
            continue
        for ti in range(E):
            canon = min(
                (orient_map(mask, p), _edge_index_map(edges, p, ti)) for p in autos
            )
            if canon in seen_pairs:
                continue
            seen_pairs.add(canon)
            graph = NclGraph(
                vertices=tuple((f"v{v}", vtypes[v]) for v in range(n)),
                edges=tuple(
                    (f"e{i}", f"v{u}", f"v{v}", weights[i])
                    for i, (u, v) in enumerate(edges)
                ),
                rotation=tuple(
                    (f"v{v}", tuple(f"e{i}" for i in rot[v])) for v in range(n)
                ),
            )
            initial = Orientation(
                tuple(
                    (f"e{i}", "v" if mask >> i & 1 else "u") for i in range(E)
                )
            )
            yield NclInstance(graph, initial, f"e{ti}")


def _edge_index_map(edges, perm, ti):
    u, v = edges[ti]
    target = frozenset((perm[u], perm[v]))
    for i, (a, b) in enumerate(edges):
        if frozenset((a, b)) == target:
            return i
    raise AssertionError
