"""Visibility representations of embedded planar graphs.

Every vertex maps to a vertical segment on its own column, every edge to
a horizontal segment on its own row, with edge endpoints lying on their
endpoint vertices' segments and no other contact between any segments.

Construction: biconnect the embedded graph by adding chords inside faces
whose boundary revisits a vertex, pick an st-edge, compute an st-order,
then sweep vertices in that order maintaining the left-to-right sequence
of "open" edges (started, not yet finished).  In an st-planar embedding
the open edges entering a vertex are consecutive, so the vertex can take
over their span and insert its outgoing edges in place.  Columns are the
st-numbers; each edge's row is fixed from its position in the open
sequence, realized with exact fractions and compacted to integers.
Dummy chord segments are dropped at the end; real coordinates stay put.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction


class NotPlanarEmbedding(Exception):
    pass


@dataclass(frozen=True)
class VisibilityRep:
    vertex_segments: tuple  # of (vertex id, x, y_low, y_high)
    edge_segments: tuple    # of (edge id, y, x_left, x_right)

    def vertex(self, v):
        for seg in self.vertex_segments:
            if seg[0] == v:
                return seg
        raise KeyError(v)

    def edge(self, e):
        for seg in self.edge_segments:
            if seg[0] == e:
                return seg
        raise KeyError(e)

    def to_dict(self):
        return {
            "vertex_segments": {
                v: {"x": x, "y_low": lo, "y_high": hi}
                for (v, x, lo, hi) in self.vertex_segments
            },
            "edge_segments": {
                e: {"y": y, "x_left": xl, "x_right": xr}
                for (e, y, xl, xr) in self.edge_segments
            },
        }


# -- embedding plumbing --------------------------------------------------------


class _Embedded:
    """Mutable rotation-system graph over hashable vertex/edge ids."""

    def __init__(self, vertices, edges, rotation):
        self.vertices = list(vertices)
        self.edges = dict(edges)  # eid -> (u, v)
        self.rot = {v: list(order) for (v, order) in rotation.items()}

    def other(self, eid, v):
        u, w = self.edges[eid]
        return w if v == u else u

    def faces(self):
        darts = set()
        for eid, (u, v) in self.edges.items():
            darts.add((eid, u))
            darts.add((eid, v))
        out = []
        left = set(darts)
        while left:
            d0 = next(iter(left))
            walk = []
            d = d0
            while True:
                left.discard(d)
                walk.append(d)
                eid, tail = d
                head = self.other(eid, tail)
                order = self.rot[head]
                i = order.index(eid)
                d = (order[(i + 1) % len(order)], head)
                if d == d0:
                    break
            out.append(walk)
        return out

    def euler_ok(self):
        V = len(self.vertices)
        E = len(self.edges)
        F = len(self.faces())
        return V - E + F == 2  # connected input required

    def articulation_points(self):
        adj = {v: [] for v in self.vertices}
        for eid, (u, v) in self.edges.items():
            adj[u].append(v)
            adj[v].append(u)
        idx = {}
        low = {}
        cut = set()
        counter = [0]

        def dfs(root):
            stack = [(root, None, iter(adj[root]))]
            idx[root] = low[root] = counter[0]
            counter[0] += 1
            children = {root: 0}
            parent = {root: None}
            order = [root]
            while stack:
                v, p, it = stack[-1]
                advanced = False
                for w in it:
                    if w == p:
                        p = None  # allow one backtrack over the parent only
                        continue
                    if w in idx:
                        low[v] = min(low[v], idx[w])
                    else:
                        idx[w] = low[w] = counter[0]
                        counter[0] += 1
                        parent[w] = v
                        children[v] = children.get(v, 0) + 1
                        children.setdefault(w, 0)
                        order.append(w)
                        stack.append((w, v, iter(adj[w])))
                        advanced = True
                        break
                if not advanced:
                    stack.pop()
                    if parent[v] is not None:
                        u = parent[v]
                        low[u] = min(low[u], low[v])
                        if parent[u] is not None and low[v] >= idx[u]:
                            cut.add(u)
            if children.get(root, 0) > 1:
                cut.add(root)

        if not self.vertices:
            return set()
        dfs(self.vertices[0])
        if len(idx) != len(self.vertices):
            raise NotPlanarEmbedding("graph is not connected")
        return cut

    def add_chord(self, eid, face_walk, i, j):
        """Connect tail(face_walk[i]) and tail(face_walk[j]) inside the face."""
        u = face_walk[i][1]
        w = face_walk[j][1]
        self.edges[eid] = (u, w)

        def insert_at(v, pos):
            prev_edge = face_walk[pos - 1][0]
            order = self.rot[v]
            # the corner sits between the arriving edge and its successor
            k = order.index(prev_edge)
            order.insert(k + 1, eid)

        insert_at(u, i)
        insert_at(w, j)


def _biconnect(emb: _Embedded):
    """Add chords inside faces until there is no articulation point."""
    added = []
    guard = 0
    while True:
        cuts = emb.articulation_points()
        if not cuts:
            return added
        guard += 1
        if guard > 4 * len(emb.vertices) + 8:
            raise NotPlanarEmbedding("biconnectivity augmentation did not converge")
        fixed = False
        for walk in emb.faces():
            tails = [d[1] for d in walk]
            first = {}
            dup = None
            for i, v in enumerate(tails):
                if v in first:
                    dup = (first[v], i)
                    break
                first[v] = i
            if dup is None:
                continue
            i, j = dup
            n = len(walk)
            cand = []
            for (a, b) in ((i + 1, j + 1 if j + 1 < n else 0), (i, j)):
                a %= n
                b %= n
                u, w = tails[a], tails[b]
                if u == w:
                    continue
                if any(set(emb.edges[e]) == {u, w} for e in emb.edges):
                    continue
                cand.append((a, b))
            if not cand:
                continue
            a, b = cand[0]
            eid = f"__dummy{len(added)}"
            emb.add_chord(eid, walk, a, b)
            added.append(eid)
            fixed = True
            break
        if not fixed:
            raise NotPlanarEmbedding("could not biconnect the embedding")


# -- st-order -------------------------------------------------------------------


def _st_order(adj, s, t):
    """Backtracking st-ordering: s first, t last, every inner vertex gets an
    earlier and a later neighbor.  Fast in practice on biconnected graphs."""
    n = len(adj)
    placed = [s]
    in_placed = {s}

    def remaining_ok():
        rest = [v for v in adj if v not in in_placed]
        if not rest:
            return True
        if t in in_placed:
            return False
        seen = set()
        stack = [t]
        while stack:
            v = stack.pop()
            if v in seen or v in in_placed:
                continue
            seen.add(v)
            stack.extend(w for w in adj[v] if w not in in_placed)
        return all(v in seen for v in rest)

    def backtrack():
        if len(placed) == n:
            return True
        cands = []
        for v in adj:
            if v in in_placed or v == t:
                continue
            if not any(w in in_placed for w in adj[v]):
                continue
            if not any(w not in in_placed for w in adj[v]):
                continue
            cands.append(v)
        if len(placed) == n - 1:
            cands = [t] if any(w in in_placed for w in adj[t]) else []
        for v in cands:
            placed.append(v)
            in_placed.add(v)
            if remaining_ok() and backtrack():
                return True
            placed.pop()
            in_placed.remove(v)
        return False

    if not backtrack():
        raise NotPlanarEmbedding("no st-ordering found (graph not biconnected?)")
    return placed


# -- the sweep -------------------------------------------------------------------


def _sweep(emb: _Embedded, order):
    """Assign each edge a fractional column; vertices span their incident
    edges' columns.  Returns (edge_col, vertex_span)."""
    pos = {}  # edge -> Fraction column
    stnum = {v: i for i, v in enumerate(order)}
    incident = {v: [] for v in emb.vertices}
    for eid, (u, v) in emb.edges.items():
        incident[u].append(eid)
        incident[v].append(eid)

    def try_sweep(flip):
        pos.clear()
        s = order[0]
        out0 = list(emb.rot[s])
        if flip:
            out0 = out0[::-1]
        for k, eid in enumerate(out0):
            pos[eid] = Fraction(k)
        open_cols = list(out0)
        for v in order[1:]:
            inc = [e for e in open_cols if e in incident[v]]
            if not inc:
                return None
            idxs = sorted(open_cols.index(e) for e in inc)
            if idxs != list(range(idxs[0], idxs[0] + len(idxs))):
                return None  # incoming edges not consecutive: wrong chirality
            lo_i, hi_i = idxs[0], idxs[-1]
            # outgoing edges, in rotation order starting after the incoming arc
            rotv = emb.rot[v]
            out = [e for e in rotv if e not in inc]
            if out:
                # rotate so that out edges appear in one arc following inc
                rr = rotv * 2
                start = None
                for k in range(len(rotv)):
                    if rr[k] in inc and rr[k + 1] not in inc:
                        start = k + 1
                        break
                if start is None:
                    return None
                arc = []
                k = start
                while rr[k % len(rotv)] not in inc and len(arc) < len(out):
                    arc.append(rr[k % len(rotv)])
                    k += 1
                out = arc if not flip else arc[::-1]
            left = pos[open_cols[lo_i - 1]] if lo_i > 0 else pos[open_cols[lo_i]] - 1
            right = (
                pos[open_cols[hi_i + 1]]
                if hi_i + 1 < len(open_cols)
                else pos[open_cols[hi_i]] + 1
            )
            lo_pos = pos[open_cols[lo_i]]
            hi_pos = pos[open_cols[hi_i]]
            new_cols = open_cols[:lo_i] + open_cols[hi_i + 1 :]
            if out:
                span_lo = max(left, lo_pos - Fraction(1, 2))
                span_hi = min(right, hi_pos + Fraction(1, 2))
                base_lo = (span_lo + lo_pos) / 2 if lo_i > 0 else lo_pos
                base_hi = (span_hi + hi_pos) / 2 if hi_i + 1 < len(open_cols) else hi_pos
                if len(out) == 1:
                    pts = [(base_lo + base_hi) / 2]
                else:
                    step = (base_hi - base_lo) / (len(out) - 1)
                    pts = [base_lo + step * k for k in range(len(out))]
                    if step == 0:
                        pts = [base_lo + Fraction(k, len(out) * 2) for k in range(len(out))]
                for eid, p in zip(out, pts):
                    pos[eid] = p
                new_cols[lo_i:lo_i] = out
            open_cols[:] = new_cols
        return dict(pos)

    for flip in (False, True):
        got = try_sweep(flip)
        if got is not None:
            return got, stnum
    raise NotPlanarEmbedding("sweep failed: embedding and st-order disagree")


def visibility_rep(graph) -> VisibilityRep:
    """Build a visibility representation for a validated NclGraph-like
    object (or anything with vertices/edges/rotation in that shape)."""
    vertices = [v for (v, _t) in graph.vertices]
    edges = {e[0]: (e[1], e[2]) for e in graph.edges}
    rotation = {v: list(order) for (v, order) in graph.rotation}
    emb = _Embedded(vertices, edges, rotation)
    if not emb.euler_ok():
        raise NotPlanarEmbedding("rotation system fails Euler's formula")
    dummies = _biconnect(emb)

    adj = {v: set() for v in emb.vertices}
    for eid, (u, v) in emb.edges.items():
        adj[u].add(v)
        adj[v].add(u)
    adj = {v: sorted(ws) for v, ws in adj.items()}
    s = emb.vertices[0]
    t = next(iter(adj[s]))
    order = _st_order(adj, s, t)

    pos, stnum = _sweep(emb, order)

    # compact fractional columns to integer rows (these become tunnel rows)
    cols = sorted(set(pos.values()))
    col_of = {c: i for i, c in enumerate(cols)}
    edge_row = {eid: col_of[p] for eid, p in pos.items()}

    vsegs = []
    for v in emb.vertices:
        rows = [edge_row[e] for e in emb.edges if v in emb.edges[e]]
        vsegs.append((v, stnum[v], min(rows), max(rows)))
    esegs = []
    for eid, (u, v) in emb.edges.items():
        if eid.startswith("__dummy"):
            continue
        x1, x2 = sorted((stnum[u], stnum[v]))
        esegs.append((eid, edge_row[eid], x1, x2))
    return VisibilityRep(tuple(vsegs), tuple(esegs))


def validate_rep(graph, rep: VisibilityRep) -> list:
    """Geometric check of all the representation invariants."""
    problems = []
    vseg = {v: (x, lo, hi) for (v, x, lo, hi) in rep.vertex_segments}
    for (v, _t) in graph.vertices:
        if v not in vseg:
            problems.append(f"vertex {v} has no segment")
    ends = {e[0]: (e[1], e[2]) for e in graph.edges}
    eseg = {}
    for (e, y, xl, xr) in rep.edge_segments:
        eseg[e] = (y, xl, xr)
        if xl > xr:
            problems.append(f"edge {e}: x_left > x_right")
    for e in ends:
        if e not in eseg:
            problems.append(f"edge {e} has no segment")
    if problems:
        return problems

    for e, (u, v) in ends.items():
        y, xl, xr = eseg[e]
        xs = sorted((vseg[u][0], vseg[v][0]))
        if [xl, xr] != xs:
            problems.append(f"edge {e}: endpoints not at its vertices' columns")
            continue
        for w in (u, v):
            x, lo, hi = vseg[w]
            if not (lo <= y <= hi):
                problems.append(f"edge {e}: endpoint misses vertex {w} segment")

    # vertex-vertex: distinct columns or disjoint ranges
    vs = list(vseg.items())
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            (a, (xa, loa, hia)), (b, (xb, lob, hib)) = vs[i], vs[j]
            if xa == xb and not (hia < lob or hib < loa):
                problems.append(f"vertex segments {a} and {b} overlap")
    # edge-edge: rows distinct or ranges disjoint; same row touching is banned
    es = list(eseg.items())
    for i in range(len(es)):
        for j in range(i + 1, len(es)):
            (a, (ya, xla, xra)), (b, (yb, xlb, xrb)) = es[i], es[j]
            if ya == yb and not (xra < xlb or xrb < xla):
                problems.append(f"edge segments {a} and {b} intersect")
    # edge-vertex: only the two endpoint contacts
    for (e, (y, xl, xr)) in es:
        u, v = ends[e]
        for (w, (x, lo, hi)) in vs:
            if xl <= x <= xr and lo <= y <= hi:
                if w not in (u, v):
                    problems.append(f"edge {e} touches foreign vertex {w}")
                elif not (x == xl or x == xr):
                    problems.append(f"edge {e} crosses through vertex {w}")
    return problems


def rep_to_json(rep: VisibilityRep) -> str:
    return json.dumps(rep.to_dict(), indent=2, sort_keys=True)


def rep_to_svg(rep: VisibilityRep, scale=12) -> str:
    """Debug rendering."""
    xs = [x for (_v, x, _lo, _hi) in rep.vertex_segments]
    ys = [hi for (_v, _x, _lo, hi) in rep.vertex_segments]
    W = (max(xs) + 2) * scale
    H = (max(ys) + 2) * scale
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">']
    for (v, x, lo, hi) in rep.vertex_segments:
        parts.append(
            f'<line x1="{(x+1)*scale}" y1="{H-(lo+1)*scale}" x2="{(x+1)*scale}" '
            f'y2="{H-(hi+1)*scale}" stroke="black" stroke-width="3"/>'
            f'<text x="{(x+1)*scale+2}" y="{H-(hi+1)*scale-2}" font-size="10">{v}</text>'
        )
    for (e, y, xl, xr) in rep.edge_segments:
        parts.append(
            f'<line x1="{(xl+1)*scale}" y1="{H-(y+1)*scale}" x2="{(xr+1)*scale}" '
            f'y2="{H-(y+1)*scale}" stroke="steelblue" stroke-width="1.5"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
