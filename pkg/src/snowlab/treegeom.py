"""The tree T, its triangulated polygon, the extended tree and segment corridor schemes."""
from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property


class NotATree(ValueError):
    pass


class ValenceExceeded(ValueError):
    pass


def nxt(i: int) -> int:
    """The next index in the same vertex triple: 3v -> 3v+1 -> 3v+2 -> 3v."""
    return 3 * (i // 3) + (i % 3 + 1) % 3


def prv(i: int) -> int:
    return 3 * (i // 3) + (i % 3 + 2) % 3


def triple(v: int) -> tuple[int, int, int]:
    return (3 * v, 3 * v + 1, 3 * v + 2)


@dataclass(frozen=True)
class SnowTree:
    """A tree of valence at most 3 with its amalgamation data.

    `edges` holds (u, v, i, j): the subgroup A_i of vertex u is glued to A_j of vertex v.
    """

    n_vertices: int
    edges: tuple[tuple[int, int, int, int], ...]
    peripherals: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.n_vertices

    @property
    def m(self) -> int:
        return self.n_vertices + 1

    @cached_property
    def partner(self) -> dict[int, int]:
        p = {}
        for u, v, i, j in self.edges:
            p[i] = j
            p[j] = i
        return p

    def is_internal(self, i: int) -> bool:
        return i in self.partner

    def canonical_side(self, i: int) -> int:
        """Key of the side of D carrying index i: the lower of the two glued indices."""
        j = self.partner.get(i)
        return i if j is None else min(i, j)

    @cached_property
    def neighbors(self) -> dict[int, list[tuple[int, int, int]]]:
        """vertex -> list of (neighbor, my index, their index)."""
        nb: dict[int, list] = {v: [] for v in range(self.n_vertices)}
        for u, v, i, j in self.edges:
            nb[u].append((v, i, j))
            nb[v].append((u, j, i))
        return nb

    def nu(self, k: int) -> int:
        return self.peripherals[k]

    def to_json(self) -> dict:
        return {"vertices": self.n_vertices, "edges": [list(e) for e in self.edges]}

    def side_keys(self) -> list[int]:
        """All edges of the extended tree, keyed by side index."""
        keys = sorted({self.canonical_side(i) for v in range(self.n_vertices) for i in triple(v)})
        return keys

    def vertex_path(self, a: int, b: int) -> list[int]:
        """Tree vertices from a to b."""
        prev = {a: None}
        q = deque([a])
        while q:
            u = q.popleft()
            if u == b:
                break
            for v, _, _ in self.neighbors[u]:
                if v not in prev:
                    prev[v] = u
                    q.append(v)
        path = [b]
        while path[-1] != a:
            path.append(prev[path[-1]])
        return path[::-1]

    def edge_index(self, u: int, v: int) -> tuple[int, int]:
        for w, i, j in self.neighbors[u]:
            if w == v:
                return i, j
        raise KeyError((u, v))


def _default_slots(n: int, adj: dict[int, list[int]]) -> list[tuple[int, int, int, int]]:
    """BFS from vertex 0: a child spends slot 2 on its parent edge, children get slots 1, 0, 2."""
    out = []
    parent = {0: None}
    order = deque([0])
    while order:
        u = order.popleft()
        kids = sorted(v for v in adj[u] if v not in parent)
        slots = [1, 0, 2] if parent[u] is None else [1, 0]
        for v, s in zip(kids, slots):
            parent[v] = u
            out.append((u, v, 3 * u + s, 3 * v + 2))
            order.append(v)
    return out


def _boundary_order(n: int, partner: dict[int, int]) -> tuple[int, ...]:
    side_count = 3 * n
    peripheral = [i for i in range(side_count) if i not in partner]
    start = min(peripheral)
    order = [start]
    side = start
    while True:
        c = nxt(side)
        while c in partner:
            c = nxt(partner[c])
        if c == start:
            break
        order.append(c)
        side = c
        if len(order) > len(peripheral):
            raise NotATree("boundary walk does not close")
    if sorted(order) != sorted(peripheral):
        raise NotATree("side pairings do not form a disk")
    return tuple(order)


def build_snowtree(desc=None) -> SnowTree:
    """From {"edges": [[u, v], ...]} or [[u, v, i, j], ...]; None or no edges gives one vertex."""
    if desc is None:
        desc = {"edges": []}
    if isinstance(desc, str):
        desc = json.loads(desc)
    if isinstance(desc, (list, tuple)):
        desc = {"edges": list(desc)}
    raw = [tuple(int(x) for x in e) for e in desc.get("edges", [])]
    verts = {x for e in raw for x in e[:2]}
    n = int(desc.get("vertices", (max(verts) + 1) if verts else 1))
    if verts and (min(verts) < 0 or max(verts) >= n):
        raise NotATree("vertex ids must be 0..n-1")
    if len(raw) != n - 1:
        raise NotATree(f"{n} vertices need {n - 1} edges, got {len(raw)}")
    adj: dict[int, list[int]] = {v: [] for v in range(n)}
    for e in raw:
        u, v = e[0], e[1]
        if u == v:
            raise NotATree("loop edge")
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    q = deque([0])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                q.append(v)
    if len(seen) != n:
        raise NotATree("graph is not connected")
    for v, nb in adj.items():
        if len(nb) > 3:
            raise ValenceExceeded(f"vertex {v} has valence {len(nb)}")
    if all(len(e) == 2 for e in raw):
        edges = _default_slots(n, adj)
    elif all(len(e) == 4 for e in raw):
        edges = []
        used = set()
        for u, v, i, j in raw:
            if i // 3 != u or j // 3 != v:
                raise NotATree(f"edge {(u, v, i, j)}: index not in the endpoint's triple")
            if i in used or j in used:
                raise NotATree(f"edge {(u, v, i, j)} reuses a peripheral subgroup")
            used |= {i, j}
            edges.append((u, v, i, j))
    else:
        raise NotATree("edges must all be [u, v] or all be [u, v, i, j]")
    partner = {}
    for u, v, i, j in edges:
        partner[i] = j
        partner[j] = i
    return SnowTree(n, tuple(edges), _boundary_order(n, partner))


# the tree of the six-triangle polygon used as a running example
FIG_TREE = {"edges": [[0, 1, 1, 5], [1, 3, 3, 11], [1, 2, 4, 8], [3, 4, 10, 12], [4, 5, 14, 17]]}


@dataclass(frozen=True)
class Segment:
    """A maximal segment of the extended tree, given by its two leaves (peripheral indices)."""

    ends: tuple[int, int]
    vertices: tuple[int, ...]  # tree vertices crossed, in order
    sides: tuple[tuple[int, int], ...]  # (entering, exiting) side index per crossed triangle

    @property
    def edge_keys(self) -> frozenset[int]:
        keys = {self.ends[0], self.ends[1]}
        for (_, out), (inn, _) in zip(self.sides, self.sides[1:]):
            keys.add(min(out, inn))
        return frozenset(keys)

    def __str__(self) -> str:
        return f"sigma({self.ends[0]},{self.ends[1]})"


def segment(T: SnowTree, p: int, q: int) -> Segment:
    if p == q:
        raise ValueError("a segment needs two distinct leaves")
    p, q = min(p, q), max(p, q)
    per = set(T.peripherals)
    if p not in per or q not in per:
        raise ValueError(f"{p} and {q} must both be peripheral indices")
    path = T.vertex_path(p // 3, q // 3)
    sides = []
    enter = p
    for k, v in enumerate(path):
        if k + 1 < len(path):
            out, nxt_in = T.edge_index(v, path[k + 1])
        else:
            out, nxt_in = q, None
        sides.append((enter, out))
        enter = nxt_in
    return Segment((p, q), tuple(path), tuple(sides))


def all_segments(T: SnowTree) -> list[Segment]:
    per = sorted(T.peripherals)
    return [segment(T, p, q) for p, q in itertools.combinations(per, 2)]


def separated_corner(enter: int, out: int) -> int:
    if out == nxt(enter):
        return out
    if enter == nxt(out):
        return enter
    raise ValueError(f"sides {enter}, {out} are not two sides of one triangle")


@dataclass(frozen=True)
class CorridorScheme:
    """Edge labels (kind, index) with orientation bits; both names of a glued edge are listed."""

    orient: dict = field(hash=False, compare=False)
    family: str = "sigma"
    tag: tuple = ()

    @property
    def labels(self) -> frozenset:
        return frozenset(self.orient)

    def __contains__(self, label) -> bool:
        return label in self.orient

    def split(self) -> tuple[frozenset, frozenset]:
        xa = frozenset(l for l in self.orient if l[0] in "xa")
        yb = frozenset(l for l in self.orient if l[0] in "yb")
        return xa, yb


def scheme_for_segment(T: SnowTree, s: Segment) -> CorridorScheme:
    """Corner and side labels crossed by the segment, with orientations propagated along it.

    Inside one triangle with separated corner c, the side ending at c and the label x_c
    share an orientation and the side starting at c gets the opposite one; a glued
    side is the same edge read backwards, so its two names have opposite bits.
    """
    orient: dict = {}
    carry = None  # orientation of the side just crossed, as named in the next triangle
    for enter, out in s.sides:
        c = separated_corner(enter, out)
        if carry is None:
            ox = 1
        else:
            ox = carry if enter == prv(c) else -carry
        for k, kk in (("x", "a"), ("y", "b")):
            for lab, o in (((k, c), ox), ((kk, prv(c)), ox), ((kk, c), -ox)):
                if orient.get(lab, o) != o:
                    raise AssertionError(f"contradictory orientation at {lab}")
                orient[lab] = o
        o_out = orient[("a", out)]
        j = T.partner.get(out)
        if j is not None:
            for kk in "ab":
                lab = (kk, j)
                o = -orient[(kk, out)]
                if orient.get(lab, o) != o:
                    raise AssertionError(f"contradictory orientation at {lab}")
                orient[lab] = o
            carry = -o_out
    return CorridorScheme(orient, "sigma", s.ends)


def r_scheme(i: int) -> CorridorScheme:
    return CorridorScheme({("r", i): 1}, "r", (i,))


def leaves_beyond(T: SnowTree, v: int, side: int) -> list[int]:
    """Peripheral indices reachable from vertex v by leaving through `side`."""
    if side not in T.partner:
        return [side]
    j = T.partner[side]
    u = j // 3
    out = []
    for s in triple(u):
        if s != j:
            out.extend(leaves_beyond(T, u, s))
    return out


def crossing_pair_for_edge(T: SnowTree, e: int) -> tuple[Segment, Segment]:
    """Two segments meeting exactly in the extended-tree edge keyed by side e.

    For an interior edge the endpoints are linked on the polygon boundary; among
    valid choices the lexicographically least pair of leaf pairs is returned.
    """
    pos = {v: k for k, v in enumerate(T.peripherals)}
    if e not in T.partner:
        v = e // 3
        g1, g2 = [leaves_beyond(T, v, s) for s in triple(v) if s != e]
        cands = []
        for a in g1:
            for b in g2:
                pair = sorted([tuple(sorted((e, a))), tuple(sorted((e, b)))])
                cands.append(pair)
    else:
        i, j = e, T.partner[e]
        u, v = i // 3, j // 3
        U = [leaves_beyond(T, u, s) for s in triple(u) if s != i]
        V = [leaves_beyond(T, v, s) for s in triple(v) if s != j]
        cands = []
        for ua, ub in ((0, 1), (1, 0)):
            for va, vb in ((0, 1), (1, 0)):
                for a in U[ua]:
                    for b in V[va]:
                        for c in U[ub]:
                            for d in V[vb]:
                                if _linked(pos, (a, b), (c, d)):
                                    pair = sorted([tuple(sorted((a, b))), tuple(sorted((c, d)))])
                                    cands.append(pair)
    best = min(cands)
    return segment(T, *best[0]), segment(T, *best[1])


def _linked(pos: dict[int, int], p: tuple[int, int], q: tuple[int, int]) -> bool:
    lo, hi = sorted((pos[p[0]], pos[p[1]]))
    inside = [lo < pos[x] < hi for x in q]
    return inside[0] != inside[1]


def linked_in_boundary(T: SnowTree, p: tuple[int, int], q: tuple[int, int]) -> bool:
    pos = {v: k for k, v in enumerate(T.peripherals)}
    return _linked(pos, p, q)


def to_dot(T: SnowTree, which: str = "ext", overlay: Segment | None = None) -> str:
    """DOT text for the tree ("tree"), extended tree ("ext") or polygon ("polygon")."""
    lines = [f"graph {which} {{"]
    hot = overlay.edge_keys if overlay else frozenset()
    if which == "polygon":
        for v in range(T.n_vertices):
            a, b, c = triple(v)
            lines.append(f'  t{v} [shape=triangle,label="{a},{b},{c}"];')
        for u, v, i, j in T.edges:
            style = ",color=red,penwidth=2" if min(i, j) in hot else ""
            lines.append(f'  t{u} -- t{v} [label="A{i}=A{j}"{style}];')
        for k, nu in enumerate(T.peripherals):
            style = ",color=red,penwidth=2" if nu in hot else ""
            lines.append(f'  p{nu} [shape=plaintext,label="nu{k}=A{nu}"];')
            lines.append(f"  t{nu // 3} -- p{nu} [style=dashed{style}];")
    else:
        for v in range(T.n_vertices):
            lines.append(f'  v{v} [label="{v}"];')
        for u, v, i, j in T.edges:
            style = ",color=red,penwidth=2" if min(i, j) in hot else ""
            lines.append(f'  v{u} -- v{v} [label="{i}|{j}"{style}];')
        if which == "ext":
            for nu in T.peripherals:
                style = ",color=red,penwidth=2" if nu in hot else ""
                lines.append(f'  l{nu} [shape=point,xlabel="{nu}"];')
                lines.append(f"  v{nu // 3} -- l{nu} [{style.lstrip(',')}];")
    lines.append("}")
    return "\n".join(lines)
