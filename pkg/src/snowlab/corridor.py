"""Corridors in diagrams, the crossing-region area certificate, and folded r-corridors."""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .aut import PHI, FreeAut, cached_power, codes_of, fapply, freduce, transition, word_of
from .diagram import FTYPE_ID, KIND_ID, Diagram
from .exactnum import QuadNum
from .normalform import reduced_peripheral_word
from .treegeom import (CorridorScheme, SnowTree, all_segments, build_snowtree, crossing_pair_for_edge,
                       scheme_for_segment, segment)
from .words import D1, D2, Word, measure, weighted_length


class InvalidVertices(ValueError):
    pass


def _label_key(kind: str, index: int) -> int:
    return (KIND_ID[kind] << 20) | index


@dataclass
class Corridor:
    cells: tuple[int, ...]
    kind: str  # "band" | "annulus" | "broken"
    crossings: tuple[int, ...]  # darts crossed by the dual arc, in order
    ends: tuple[int, int] | None = None  # boundary darts of a band
    scheme: CorridorScheme | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.cells)


def _scheme_mask(d: Diagram, s: CorridorScheme) -> tuple[np.ndarray, np.ndarray]:
    """Per dart: is it a scheme edge, and its transverse orientation (sign times scheme bit)."""
    keys = np.array([_label_key(k, i) for (k, i) in s.orient], dtype=np.int64)
    bits = np.array([s.orient[l] for l in s.orient], dtype=np.int64)
    dk = d.code >> 1
    if len(keys) == 0:
        return np.zeros(d.n_darts, dtype=bool), np.zeros(d.n_darts, dtype=np.int64)
    order = np.argsort(keys)
    ks, bs = keys[order], bits[order]
    pos = np.clip(np.searchsorted(ks, dk), 0, len(ks) - 1)
    hit = ks[pos] == dk
    sign = np.where(d.code & 1, -1, 1)
    trans = np.where(hit, sign * bs[pos], 0)
    return hit, trans


def scheme_profile(d: Diagram, s: CorridorScheme) -> np.ndarray:
    """Number of scheme darts on each face; a corridor scheme gives only 0 or 2."""
    hit, _ = _scheme_mask(d, s)
    return np.add.reduceat(hit.astype(np.int64), d.face_ptr[:-1]) if d.n_faces else np.zeros(0, dtype=np.int64)


def trace(d: Diagram, s: CorridorScheme) -> list[Corridor]:
    """All corridors of a scheme: bands from boundary scheme edges first, then annuli."""
    hit, _ = _scheme_mask(d, s)
    if not hit.any():
        return []
    df = d.dart_face
    tw = d.twin
    prof = scheme_profile(d, s)
    other = np.full(d.n_darts, -1, dtype=np.int64)
    sd = np.nonzero(hit)[0]
    # pair the two scheme darts of each corridor cell
    cell_darts: dict[int, list[int]] = {}
    for x in sd:
        f = int(df[x])
        if prof[f] == 2:
            cell_darts.setdefault(f, []).append(int(x))
    for f, (x, y) in cell_darts.items():
        other[x], other[y] = y, x
    seen: set[int] = set()
    out: list[Corridor] = []

    def walk(start: int) -> tuple[list[int], list[int], str, int]:
        cells, cross = [], []
        x = start
        while True:
            f = int(df[x])
            if prof[f] != 2 or f in seen:
                return cells, cross, "broken", x
            seen.add(f)
            cells.append(f)
            y = int(other[x])
            cross += [x, y]
            if tw[y] < 0:
                return cells, cross, "band", y
            x = int(tw[y])
            if x == start:
                return cells, cross, "annulus", x

    for b in d.boundary_walk():
        if hit[b] and int(df[b]) not in seen:
            cells, cross, kind, end = walk(b)
            out.append(Corridor(tuple(cells), kind, tuple(cross), (b, end) if kind == "band" else None, s))
    for f in sorted(cell_darts):
        if f in seen:
            continue
        x = cell_darts[f][0]
        cells, cross, kind, _ = walk(x)
        out.append(Corridor(tuple(cells), "annulus" if kind in ("annulus", "broken") else kind, tuple(cross), None, s))
    return out


def bands_unlinked(d: Diagram, corridors: list[Corridor]) -> bool:
    """Band endpoint pairs never interleave along the boundary (corridors do not cross)."""
    pos = {x: k for k, x in enumerate(d.boundary_walk())}
    pairs = sorted(tuple(sorted((pos[c.ends[0]], pos[c.ends[1]]))) for c in corridors if c.kind == "band")
    stack: list[int] = []
    for a, b in sorted(((a, b) for a, b in pairs), key=lambda t: t[0]):
        while stack and stack[-1] < a:
            stack.pop()
        if stack and stack[-1] < b:
            return False
        stack.append(b)
    return True


def orientation_check(d: Diagram, s: CorridorScheme, corridors: list[Corridor] | None = None) -> bool:
    """In every corridor cell the dual arc enters through one scheme edge and leaves through the other;
    band ends carry opposite orientations relative to the boundary."""
    hit, trans = _scheme_mask(d, s)
    if corridors is None:
        corridors = trace(d, s)
    df = d.dart_face
    for c in corridors:
        if c.kind == "broken":
            return False
        xs = c.crossings
        for k, f in enumerate(c.cells):
            x, y = xs[2 * k], xs[2 * k + 1]
            if df[x] != f or df[y] != f or trans[x] == 0 or trans[x] != -trans[y]:
                return False
        if c.kind == "band":
            a, b = c.ends
            if trans[a] != -trans[b]:
                return False
    return True


def sigma_schemes(T: SnowTree) -> list[CorridorScheme]:
    return [scheme_for_segment(T, sg) for sg in all_segments(T)]


@dataclass
class CrossingRegions:
    squares: int
    triangles: int
    unpaired: int = 0

    def __iter__(self):
        return iter((self.squares, self.triangles))

    @property
    def area(self) -> int:
        return 2 * self.squares + self.triangles


def crossing_regions(d: Diagram, e: int, T: SnowTree) -> CrossingRegions:
    """e-crossing regions: cells lying in corridors of both crossing segments of the edge e."""
    s1, s2 = crossing_pair_for_edge(T, e)
    A, B = scheme_for_segment(T, s1), scheme_for_segment(T, s2)
    if d.n_faces == 0:
        return CrossingRegions(0, 0)
    both = (scheme_profile(d, A) == 2) & (scheme_profile(d, B) == 2)
    quad = both & (d.face_type == FTYPE_ID["quad"])
    tri = both & (d.face_type == FTYPE_ID["triangle"])
    squares = int(np.count_nonzero(quad))
    kinds = d.code >> 21
    ab = (kinds == KIND_ID["a"]) | (kinds == KIND_ID["b"])
    df = d.dart_face
    tw = d.twin
    tri_darts = np.nonzero(ab & tri[df])[0]
    triangles = unpaired = pairs = 0
    for x in tri_darts:
        y = tw[x]
        if y < 0:
            triangles += 1
        elif tri[df[y]]:
            pairs += 1
        else:
            unpaired += 1
    return CrossingRegions(squares + pairs // 2, triangles, unpaired)


def lower_bound_certificate(d: Diagram, T: SnowTree | None = None) -> int:
    """Sum over edges of the extended tree of e-crossing areas; crossing regions of different
    edges share no cells, so this bounds the area of any diagram with the same boundary."""
    T = T if isinstance(T, SnowTree) else build_snowtree(T)
    return sum(crossing_regions(d, e, T).area for e in T.side_keys())


def corridor_counts(d: Diagram, T: SnowTree) -> dict[tuple[int, int], tuple[int, int]]:
    """(bands, annuli) for the scheme of every maximal segment."""
    out = {}
    for sg in all_segments(T):
        cs = trace(d, scheme_for_segment(T, sg))
        out[sg.ends] = (sum(c.kind == "band" for c in cs), sum(c.kind != "band" for c in cs))
    return out


# ----------------------------------------------------------------- folded corridors

class _UF:
    def __init__(self, n: int):
        self.p = list(range(n))

    def find(self, x: int) -> int:
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[max(ra, rb)] = min(ra, rb)


@dataclass
class FoldedCorridor:
    """Cells k = 1..L: bottom edge q_{k-1} -> q_k, r-edges from top to bottom, top path phi^n(l_k)."""

    bottom: tuple  # reduced F-codes of w, read in a_nu0, b_nu0
    top: tuple  # reduced F-codes of phi^n(w), read in a_nui, b_nui
    stable_index: int
    n: int
    phi: FreeAut
    top_vertices: list[int]  # vertex classes along the final top path
    seam_edges: list[tuple[int, int]]  # r-edges and folded interior edges (class ids)
    r_edges: list[tuple[int, int]]  # (top class, bottom vertex) per bottom vertex
    cells: list[list[int]]  # vertex classes on each cell boundary
    folds: int
    nu0: int = 0
    nui: int = 1

    @property
    def L(self) -> int:
        """Largest cell boundary length."""
        fwd = cached_power(self.phi, self.n).codes
        return 3 + max(len(fwd[0]), len(fwd[1]))

    @property
    def n_bottom(self) -> int:
        return len(self.bottom) + 1

    def bottom_word(self) -> Word:
        return word_of(self.bottom, "a", "b", self.nu0)

    def top_word(self) -> Word:
        return word_of(self.top, "a", "b", self.nui)

    def _components(self):
        adj: dict[int, list[int]] = {}
        for a, b in self.seam_edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        comp: dict[int, int] = {}
        for v in adj:
            if v in comp:
                continue
            comp[v] = v
            q = deque([v])
            while q:
                x = q.popleft()
                for y in adj[x]:
                    if y not in comp:
                        comp[y] = v
                        q.append(y)
        return adj, comp

    def seam_violations(self) -> list[str]:
        adj, comp = self._components()
        top = set(self.top_vertices)
        bottom = set(range(self.n_bottom))
        groups: dict[int, list[int]] = {}
        for v, c in comp.items():
            groups.setdefault(c, []).append(v)
        ecount: dict[int, int] = {}
        for a, _ in self.seam_edges:
            ecount[comp[a]] = ecount.get(comp[a], 0) + 1
        viol = []
        for c, vs in groups.items():
            if ecount.get(c, 0) != len(vs) - 1:
                viol.append(f"seam component at {c} is not a tree")
            tv = [v for v in vs if v in top]
            if len(tv) != 1:
                viol.append(f"seam component at {c} has {len(tv)} top vertices")
            for v in vs:
                if len(adj[v]) == 1 and v not in top and v not in bottom:
                    viol.append(f"interior leaf {v} in seam component at {c}")
        return viol

    def below(self, p: int) -> list[int]:
        """Bottom vertices q with p above q."""
        _, comp = self._components()
        if p not in comp:
            return []
        c = comp[p]
        return sorted(v for v, cc in comp.items() if cc == c and v < self.n_bottom)

    def k0(self) -> int:
        best = 0
        _, comp = self._components()
        bottoms: dict[int, list[int]] = {}
        for v, c in comp.items():
            if v < self.n_bottom:
                bottoms.setdefault(c, []).append(v)
        for p in self.top_vertices:
            qs = bottoms.get(comp.get(p, -1), [])
            if qs:
                best = max(best, max(qs) - min(qs))
        return best

    def _graph_without_bottom(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {}
        edges = list(self.seam_edges) + list(zip(self.top_vertices, self.top_vertices[1:]))
        for a, b in edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        return adj

    def nearly_above(self, p: int) -> dict[int, list[int]]:
        """Bottom vertices q that p is nearly above, each with a shortest witness path avoiding the bottom."""
        top = set(self.top_vertices)
        partners = {p}  # being above q implies being nearly above q
        for cell in self.cells:
            if p in cell:
                partners.update(v for v in cell if v in top)
        targets = set()
        for pp in partners:
            targets.update(self.below(pp))
        adj = self._graph_without_bottom()
        prev = {p: None}
        q = deque([p])
        while q:
            x = q.popleft()
            for y in adj.get(x, []):
                if y not in prev:
                    prev[y] = x
                    q.append(y)
        out = {}
        for t in sorted(targets):
            if t not in prev:
                continue
            path = [t]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            out[t] = path[::-1]
        return out

    def k1_bound(self) -> int:
        return (self.k0() + 1) * self.L


def fold_corridor(w, i: int = 1, n: int = 1, phi: FreeAut = PHI, T: SnowTree | None = None) -> FoldedCorridor:
    """Unfolded r_i-corridor on the bottom word w, then leftmost-innermost folding along the top."""
    if isinstance(w, str):
        w = Word.parse(w)
    c = freduce(codes_of(w)) if isinstance(w, Word) else freduce(tuple(w))
    if isinstance(w, Word) and len(c) != len(w):
        raise ValueError("the bottom word must be reduced")
    T = T or build_snowtree()
    fwd = cached_power(phi, n).codes
    L = len(c)
    imgs = [fapply(fwd, (v,)) for v in c]
    N = sum(len(x) for x in imgs)
    # vertex ids: bottom 0..L, raw top L+1 .. L+1+N
    top0 = L + 1
    uf = _UF(L + 2 + N)
    raw_edges = []  # (start, end, code) along the raw top
    cum = [0]
    for img in imgs:
        for v in img:
            k = len(raw_edges)
            raw_edges.append((top0 + k, top0 + k + 1, v))
        cum.append(len(raw_edges))
    stack: list[tuple[int, int, int]] = []
    fold_pairs = []
    for e in raw_edges:
        if stack and stack[-1][2] == -e[2]:
            s = stack.pop()
            uf.union(s[0], e[1])
            fold_pairs.append((s[0], s[1]))
        else:
            stack.append(e)
    F = uf.find
    top_vertices = [F(s[0]) for s in stack] + [F(stack[-1][1])] if stack else [F(top0)]
    top_codes = tuple(s[2] for s in stack)
    r_edges = [(F(top0 + cum[k]), k) for k in range(L + 1)]
    seam = [(F(a), F(b)) for a, b in fold_pairs] + r_edges
    cells = []
    for k in range(1, L + 1):
        vs = [k - 1, k] + [F(top0 + j) for j in range(cum[k - 1], cum[k] + 1)]
        cells.append(sorted(set(vs)))
    return FoldedCorridor(c, top_codes, i, n, phi, top_vertices, seam, r_edges, cells, len(fold_pairs),
                          T.peripherals[0], T.peripherals[i] if i < len(T.peripherals) else i)


def segment_length_bound(fc: FoldedCorridor, p1: int, p2: int, q1: int, q2: int,
                         d1=D1, d2=D2) -> tuple:
    """(observed, predicted, defect): weighted length of the bottom segment [q1, q2]
    against the weighted length of phi^-n of the top segment [p1, p2] (positions along each side)."""
    ntop = len(fc.top_vertices)
    if not (0 <= p1 <= p2 < ntop and 0 <= q1 <= q2 < fc.n_bottom):
        raise InvalidVertices("segment endpoints out of range or out of order")
    for p, q in ((p1, q1), (p2, q2)):
        if q not in fc.nearly_above(fc.top_vertices[p]):
            raise InvalidVertices(f"top position {p} is not nearly above bottom vertex {q}")
    u = fc.top[p1:p2]
    bwd = cached_power(fc.phi, -fc.n).codes
    pre = fapply(bwd, u)
    observed = _wl(fc.bottom[q1:q2], d1, d2)
    predicted = _wl(pre, d1, d2)
    return observed, predicted, observed - predicted


def _wl(c, d1, d2):
    nx = sum(1 for v in c if abs(v) == 1)
    return d1 * nx + d2 * (len(c) - nx)


@dataclass
class ConstantsReport:
    K0_observed: int = 0
    K1_observed: int = 0  # longest witness path actually needed
    K1_bound: int = 0  # (K0 + 1) L
    K2_observed: QuadNum | float = 0
    samples: int = 0
    max_length: int = 0
    seam_violations: int = 0
    top_mismatches: int = 0
    extra: dict = field(default_factory=dict)
    history: list[int] = field(default_factory=list)  # running K0 after each sample


def random_reduced(rng: random.Random, length: int) -> tuple:
    out: list[int] = []
    while len(out) < length:
        v = rng.choice((1, -1, 2, -2))
        if out and out[-1] == -v:
            continue
        out.append(v)
    return tuple(out)


def measure_constants(n: int = 1, phi: FreeAut = PHI, samples: int = 200, max_length: int = 50,
                      seed: int = 0, segment_samples: int = 3) -> ConstantsReport:
    """Empirical K0, K1, K2 over random reduced bottoms (lengths uniform in 1..max_length)."""
    rng = random.Random(seed)
    ed = transition(phi)
    d1, d2 = ed.left_vector
    rep = ConstantsReport(samples=samples, max_length=max_length)
    fwd = cached_power(phi, n).codes
    k2 = 0
    for _ in range(samples):
        w = random_reduced(rng, rng.randint(1, max_length))
        fc = fold_corridor(w, 1, n, phi)
        if fc.top != fapply(fwd, w):
            rep.top_mismatches += 1
        rep.seam_violations += len(fc.seam_violations())
        rep.K0_observed = max(rep.K0_observed, fc.k0())
        rep.history.append(rep.K0_observed)
        ntop = len(fc.top_vertices)
        for _ in range(segment_samples):
            a, b = sorted(rng.randrange(ntop) for _ in range(2))
            na, nb = fc.nearly_above(fc.top_vertices[a]), fc.nearly_above(fc.top_vertices[b])
            if not na or not nb:
                continue
            qa, qb = rng.choice(sorted(na)), rng.choice(sorted(nb))
            for pth in (na[qa], nb[qb]):
                rep.K1_observed = max(rep.K1_observed, len(pth) - 1)
            if qa > qb:
                continue
            _, _, defect = segment_length_bound(fc, a, b, qa, qb, d1, d2)
            k2 = max(k2, abs(defect), key=float)
        rep.K1_bound = max(rep.K1_bound, fc.k1_bound())
    rep.K2_observed = k2
    return rep


# ----------------------------------------------------------------- balancing property

@dataclass
class BalanceCheck:
    z_length: int
    rhs: dict[int, int]
    z_weighted: object
    rhs_weighted: dict[int, object]
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def balancing_check(w: Word, T: SnowTree, d1=D1, d2=D2) -> BalanceCheck | None:
    """Inequality |z| <= |w|_nu_i + |w|_nu0 + |w|_x + |w|_y (and its weighted form) for the reduced z
    with w = z(a_nu0, b_nu0); None when w is not in A_nu0."""
    nu0 = T.peripherals[0]
    z = reduced_peripheral_word(w, nu0, T)
    if z is None:
        return None
    rep = measure(w, d1, d2)
    zl = len(z)
    zw = weighted_length(z, d1, d2)
    rhs, rhsw, viol = {}, {}, []
    base = rep.peripheral(nu0) + rep.x_count + rep.y_count
    basew = rep.weighted_peripheral(nu0) + rep.weighted_x + rep.weighted_y
    for k in range(1, T.m + 1):
        nu = T.peripherals[k]
        rhs[k] = base + rep.peripheral(nu)
        rhsw[k] = basew + rep.weighted_peripheral(nu)
        if zl > rhs[k]:
            viol.append(f"plain: |z|={zl} > {rhs[k]} for i={k}")
        if zw > rhsw[k]:
            viol.append(f"weighted: {zw} > {rhsw[k]} for i={k}")
    return BalanceCheck(zl, rhs, zw, rhsw, viol)
