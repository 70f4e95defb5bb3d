"""Van Kampen diagrams as dart-based combinatorial maps."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .groups import AREA, Presentation
from .words import KINDS, Letter, Word, parse_word

FTYPES = ("triangle", "quad", "r", "s", "u", "G")
FTYPE_ID = {t: k for k, t in enumerate(FTYPES)}
_AREA_BY_ID = np.array([AREA[t] for t in FTYPES], dtype=np.int64)
KIND_ID = {k: i for i, k in enumerate(KINDS)}


class LabelMismatch(ValueError):
    """Two arcs to be glued do not carry mutually inverse labels."""


class NotADisk(ValueError):
    pass


def encode(l: Letter) -> int:
    return (((KIND_ID[l.kind] << 20) | l.index) << 1) | (1 if l.sign < 0 else 0)


def encode_parts(kind: str, index, sign) -> np.ndarray | int:
    """Vectorized encode: index and sign may be arrays."""
    neg = (np.asarray(sign) < 0).astype(np.int64)
    return (((KIND_ID[kind] << 20) | np.asarray(index, dtype=np.int64)) << 1) | neg


def decode(code: int) -> Letter:
    code = int(code)
    neg = code & 1
    rest = code >> 1
    return Letter(KINDS[rest >> 20], rest & ((1 << 20) - 1), -1 if neg else 1)


def code_kind(codes: np.ndarray) -> np.ndarray:
    return codes >> 21


def word_codes(w: Word) -> list[int]:
    return [encode(l) for l in w.letters]


@dataclass
class Diagram:
    """Faces are dart cycles (all in one rotational sense); unmatched darts form the boundary."""

    n_vertices: int
    tail: np.ndarray
    head: np.ndarray
    code: np.ndarray
    face_ptr: np.ndarray  # darts of face f are face_ptr[f]:face_ptr[f+1]
    face_type: np.ndarray
    base: int = 0  # basepoint vertex on the boundary
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._twin = None
        self._walk = None

    # structure
    @property
    def n_faces(self) -> int:
        return len(self.face_type)

    @property
    def n_darts(self) -> int:
        return len(self.tail)

    @property
    def dart_face(self) -> np.ndarray:
        sizes = np.diff(self.face_ptr)
        return np.repeat(np.arange(self.n_faces), sizes)

    @property
    def next_dart(self) -> np.ndarray:
        nd = np.arange(1, self.n_darts + 1)
        if self.n_faces:
            ends = self.face_ptr[1:] - 1
            nd[ends] = self.face_ptr[:-1]
        return nd

    @property
    def twin(self) -> np.ndarray:
        if self._twin is None:
            self._twin = _match_twins(self.tail, self.head, self.n_vertices)
        return self._twin

    @property
    def boundary_darts(self) -> np.ndarray:
        return np.nonzero(self.twin < 0)[0]

    @property
    def n_edges(self) -> int:
        return (self.n_darts + len(self.boundary_darts)) // 2

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def boundary_walk(self) -> list[int]:
        """Boundary darts in order, starting at the basepoint."""
        if self._walk is not None:
            return self._walk
        bd = self.boundary_darts
        if len(bd) == 0:
            self._walk = []
            return self._walk
        at_base = bd[self.tail[bd] == self.base]
        start = int(at_base[0]) if len(at_base) else int(bd[0])
        nd, tw = self.next_dart, self.twin
        walk = [start]
        d = start
        limit = len(bd) + 1
        while True:
            e = int(nd[d])
            while tw[e] >= 0:
                e = int(nd[tw[e]])
            if e == start:
                break
            walk.append(e)
            d = e
            if len(walk) > limit:
                raise NotADisk("boundary walk does not close")
        self._walk = walk
        return walk

    def boundary_codes(self) -> list[int]:
        return [int(self.code[d]) for d in self.boundary_walk()]

    def boundary_vertices(self) -> list[int]:
        w = self.boundary_walk()
        return [int(self.tail[d]) for d in w] + ([int(self.head[w[-1]])] if w else [self.base])

    def face_codes(self, f: int) -> list[int]:
        return [int(c) for c in self.code[self.face_ptr[f]:self.face_ptr[f + 1]]]

    def face_word(self, f: int) -> Word:
        return Word(decode(c) for c in self.face_codes(f))

    def face_type_name(self, f: int) -> str:
        return FTYPES[int(self.face_type[f])]

    def rebased(self, vertex: int) -> Diagram:
        return Diagram(self.n_vertices, self.tail, self.head, self.code, self.face_ptr,
                       self.face_type, vertex, dict(self.meta))

    # serialization
    def to_json(self) -> dict:
        return {
            "vertices": self.n_vertices,
            "darts": [[int(t), int(h), str(decode(c))] for t, h, c in zip(self.tail, self.head, self.code)],
            "faces": [{"type": FTYPES[int(self.face_type[f])],
                       "darts": list(range(int(self.face_ptr[f]), int(self.face_ptr[f + 1])))}
                      for f in range(self.n_faces)],
            "basepoint": int(self.base),
            "boundary": [int(d) for d in self.boundary_walk()],
        }

    @classmethod
    def from_json(cls, obj) -> Diagram:
        if isinstance(obj, str):
            obj = json.loads(obj)
        darts = obj["darts"]
        order = [d for f in obj["faces"] for d in f["darts"]]
        tail = np.array([darts[d][0] for d in order], dtype=np.int64)
        head = np.array([darts[d][1] for d in order], dtype=np.int64)
        code = np.array([encode(parse_word(darts[d][2]).letters[0]) for d in order], dtype=np.int64)
        ptr = np.cumsum([0] + [len(f["darts"]) for f in obj["faces"]]).astype(np.int64)
        ft = np.array([FTYPE_ID[f["type"]] for f in obj["faces"]], dtype=np.int8)
        return cls(int(obj["vertices"]), tail, head, code, ptr, ft, int(obj.get("basepoint", 0)))


def _match_twins(tail: np.ndarray, head: np.ndarray, nv: int, chunk: int = 1 << 22) -> np.ndarray:
    n = len(tail)
    idt = np.int32 if n < 2 ** 31 - 1 else np.int64
    twin = np.full(n, -1, dtype=idt)
    if n == 0:
        return twin
    key = tail.astype(np.int64) * nv + head
    order = np.argsort(key, kind="stable").astype(idt)
    sk = key[order]
    del key
    if np.any(sk[1:] == sk[:-1]):
        raise NotADisk("two darts share tail and head in the same direction")
    # reverse lookups in slices to bound the temporaries
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        rkey = head[lo:hi].astype(np.int64) * nv + tail[lo:hi]
        pos = np.minimum(np.searchsorted(sk, rkey), n - 1)
        hit = sk[pos] == rkey
        twin[lo:hi][hit] = order[pos[hit]]
    return twin


class DiagramBuilder:
    """Accumulates faces on fresh vertices plus vertex identifications, then compacts."""

    def __init__(self):
        self.nv = 0
        self._cyc: list[np.ndarray] = []
        self._codes: list[np.ndarray] = []
        self._types: list[np.ndarray] = []
        self._sizes: list[np.ndarray] = []
        self._ida: list[np.ndarray] = []
        self._idb: list[np.ndarray] = []

    def new_vertices(self, k: int) -> np.ndarray:
        out = np.arange(self.nv, self.nv + k, dtype=np.int64)
        self.nv += k
        return out

    def add_faces(self, cycles, codes, ftype: str) -> None:
        """All faces in one call have the same size; rows are vertex cycles and dart labels."""
        cycles = np.asarray(cycles, dtype=np.int64)
        codes = np.asarray(codes, dtype=np.int64)
        if cycles.size == 0:
            return
        if cycles.shape != codes.shape:
            raise ValueError("cycles and codes must have the same shape")
        k, s = cycles.shape
        self._cyc.append(_compact(cycles.reshape(-1)))
        self._codes.append(_compact(codes.reshape(-1)))
        self._types.append(np.full(k, FTYPE_ID[ftype], dtype=np.int8))
        self._sizes.append(np.full(k, s, dtype=np.int64))

    def add_face(self, cycle, codes, ftype: str) -> None:
        self.add_faces([list(cycle)], [list(codes)], ftype)

    def identify(self, a, b) -> None:
        a = np.asarray(a, dtype=np.int64).reshape(-1)
        b = np.asarray(b, dtype=np.int64).reshape(-1)
        if a.shape != b.shape:
            raise ValueError("identified vertex lists differ in length")
        self._ida.append(a)
        self._idb.append(b)

    def absorb(self, d: Diagram) -> np.ndarray:
        """Copy a finished diagram in on fresh vertices; returns the vertex renumbering."""
        vmap = self.new_vertices(d.n_vertices)
        sizes = np.diff(d.face_ptr)
        for s in np.unique(sizes):
            fs = np.nonzero(sizes == s)[0]
            idx = d.face_ptr[fs][:, None] + np.arange(s)[None, :]
            self._cyc.append(_compact(vmap[d.tail[idx]].reshape(-1)))
            self._codes.append(_compact(d.code[idx].reshape(-1)))
            self._types.append(d.face_type[fs].astype(np.int8))
            self._sizes.append(np.full(len(fs), s, dtype=np.int64))
        return vmap

    def build(self, base: int = 0, meta: dict | None = None) -> Diagram:
        n = self.nv
        idt = np.int32 if n < 2 ** 31 - 1 else np.int64
        if self._ida:
            a = np.concatenate(self._ida)
            b = np.concatenate(self._idb)
            self._ida, self._idb = [], []
            g = coo_matrix((np.ones(len(a), dtype=np.int8), (a, b)), shape=(n, n))
            del a, b
            ncomp, lab = connected_components(g, directed=False)
            del g
        else:
            ncomp, lab = n, np.arange(n)
        lab = lab.astype(idt, copy=False)
        # chunks are consumed while copying so the raw and merged arrays never both live in full
        cyc = _drain(self._cyc, idt)
        codes = _drain(self._codes, np.int32 if _fits32(self._codes) else np.int64)
        types = np.concatenate(self._types) if self._types else np.zeros(0, dtype=np.int8)
        sizes = np.concatenate(self._sizes) if self._sizes else np.zeros(0, dtype=np.int64)
        self._types, self._sizes = [], []
        np.take(lab, cyc, out=cyc)
        used = np.unique(np.concatenate([np.unique(cyc), [lab[base] if n else 0]]))
        remap = np.full(max(ncomp, 1), -1, dtype=idt)
        remap[used] = np.arange(len(used), dtype=idt)
        np.take(remap, cyc, out=cyc)
        bv = int(remap[lab[base]]) if n else 0
        del lab, remap
        ptr = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        # heads: next vertex in each face cycle
        head = np.empty_like(cyc)
        if len(cyc):
            head[:-1] = cyc[1:]
            head[ptr[1:] - 1] = cyc[ptr[:-1]]
        return Diagram(len(used), cyc, head, codes, ptr, types, bv, dict(meta or {}))


def _compact(a: np.ndarray) -> np.ndarray:
    return a.astype(np.int32) if _fits32([a]) else a


def _fits32(chunks: list[np.ndarray]) -> bool:
    return all(c.size == 0 or (int(c.max()) < 2 ** 31 and int(c.min()) >= -2 ** 31) for c in chunks)


def _drain(chunks: list[np.ndarray], dtype) -> np.ndarray:
    out = np.empty(sum(c.size for c in chunks), dtype=dtype)
    k = 0
    chunks.reverse()
    while chunks:
        c = chunks.pop()
        out[k:k + c.size] = c
        k += c.size
    return out


def empty_diagram() -> Diagram:
    b = DiagramBuilder()
    b.new_vertices(1)
    return b.build(0)


def area(d: Diagram) -> int:
    if d.n_faces == 0:
        return 0
    return int(_AREA_BY_ID[d.face_type.astype(np.int64)].sum())


def face_type_counts(d: Diagram) -> dict[str, int]:
    cnt = np.bincount(d.face_type.astype(np.int64), minlength=len(FTYPES))
    return {t: int(c) for t, c in zip(FTYPES, cnt) if c}


def boundary_word(d: Diagram) -> Word:
    return Word(decode(c) for c in d.boundary_codes())


def perimeter(d: Diagram) -> int:
    return len(d.boundary_darts)


def boundary_kind_count(d: Diagram, kind: str) -> int:
    bd = d.boundary_darts
    return int(np.count_nonzero(code_kind(d.code[bd]) == KIND_ID[kind]))


# ----------------------------------------------------------------- validation

def _canon_table(p: Presentation | None):
    """code -> canonical code, resolving aliased names of glued edges."""
    table = {}
    if p is None:
        return table
    for (k, hi), ((k2, lo), s) in p.aliases.items():
        for sign in (1, -1):
            table[encode(Letter(k, hi, sign))] = encode(Letter(k2, lo, sign * s))
    return table


def canonical_codes(codes: np.ndarray, p: Presentation | None) -> np.ndarray:
    table = _canon_table(p)
    if not table:
        return codes
    codes = np.asarray(codes)
    uniq, inv = np.unique(codes, return_inverse=True)
    mapped = np.array([table.get(int(c), int(c)) for c in uniq], dtype=np.int64)
    return mapped[inv]


def _relator_lookup(p: Presentation) -> dict[tuple, str]:
    table = _canon_table(p)
    out: dict[tuple, str] = {}
    for r in p.relators:
        c = [table.get(x, x) for x in word_codes(r.word)]
        ci = [x ^ 1 for x in reversed(c)]
        for seq in (c, ci):
            for k in range(len(seq)):
                out.setdefault(tuple(seq[k:] + seq[:k]), r.ftype)
    return out


@dataclass
class ValidationReport:
    violations: list[str]
    n_faces: int = 0
    euler: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate(d: Diagram, p: Presentation, max_reported: int = 20) -> ValidationReport:
    """Planarity, face labels, twin labels and boundary closure; violations are listed, not raised."""
    viol: list[str] = []
    try:
        tw = d.twin
    except NotADisk as e:
        return ValidationReport([str(e)], d.n_faces)
    chi = d.euler_characteristic()
    if chi != 1:
        viol.append(f"Euler characteristic {chi} != 1")
    canon = canonical_codes(d.code, p)
    inner = np.nonzero(tw >= 0)[0]
    bad = inner[canon[inner] != (canon[tw[inner]] ^ 1)]
    for dd in bad[:max_reported]:
        viol.append(f"dart {dd} label {decode(d.code[dd])} does not match its twin {decode(d.code[tw[dd]])}")
    lookup = _relator_lookup(p)
    nbad = 0
    for f in range(d.n_faces):
        seq = tuple(int(c) for c in canon[d.face_ptr[f]:d.face_ptr[f + 1]])
        t = lookup.get(seq)
        if t is None or t != FTYPES[int(d.face_type[f])]:
            nbad += 1
            if nbad <= max_reported:
                viol.append(f"face {f} reads {d.face_word(f)}, not a {d.face_type_name(f)} relator")
    if nbad > max_reported:
        viol.append(f"... {nbad} bad faces in total")
    try:
        walk = d.boundary_walk()
        if len(walk) != len(d.boundary_darts):
            viol.append("boundary has more than one component")
        elif walk and d.head[walk[-1]] != d.tail[walk[0]]:
            viol.append("boundary walk is not closed")
    except NotADisk as e:
        viol.append(str(e))
    return ValidationReport(viol, d.n_faces, chi)


def mirror_pairs(d: Diagram, p: Presentation | None = None, limit: int | None = None) -> list[tuple[int, int]]:
    """Adjacent face pairs that are mirror images across their shared edge (a reducible diagram)."""
    canon = canonical_codes(d.code, p)
    tw = d.twin
    df = d.dart_face
    ptr = d.face_ptr
    out = []
    for dd in np.nonzero(tw > np.arange(d.n_darts))[0]:
        e = int(tw[dd])
        f, g = int(df[dd]), int(df[e])
        sf = int(ptr[f + 1] - ptr[f])
        if f == g or sf != int(ptr[g + 1] - ptr[g]):
            continue
        fs = [int(canon[ptr[f] + (dd - ptr[f] + k) % sf]) for k in range(sf)]
        gs = [int(canon[ptr[g] + (e - ptr[g] + k) % sf]) for k in range(sf)]
        if gs == [fs[0] ^ 1] + [c ^ 1 for c in reversed(fs[1:])]:
            out.append((f, g))
            if limit and len(out) >= limit:
                break
    return out


def is_reduced(d: Diagram, p: Presentation | None = None) -> bool:
    return not mirror_pairs(d, p, limit=1)


# ----------------------------------------------------------------- gluing

def arc_vertices(d: Diagram, start: int, length: int) -> list[int]:
    walk = d.boundary_walk()
    n = len(walk)
    ds = [walk[(start + k) % n] for k in range(length)]
    return [int(d.tail[x]) for x in ds] + [int(d.head[ds[-1]])] if ds else []


def arc_codes(d: Diagram, start: int, length: int) -> list[int]:
    walk = d.boundary_walk()
    n = len(walk)
    return [int(d.code[walk[(start + k) % n]]) for k in range(length)]


def glue(d1: Diagram, arc1: tuple[int, int], d2: Diagram, arc2: tuple[int, int],
         p: Presentation | None = None) -> Diagram:
    """Identify boundary arc1 of d1 with boundary arc2 of d2 read backwards.

    Arcs are (start position in the boundary walk, number of darts); the labels of
    arc2 must spell the inverse of the labels of arc1.
    """
    (s1, l1), (s2, l2) = arc1, arc2
    if l1 != l2:
        raise LabelMismatch("arcs have different lengths")
    c1 = canonical_codes(np.array(arc_codes(d1, s1, l1), dtype=np.int64), p)
    c2 = canonical_codes(np.array(arc_codes(d2, s2, l2), dtype=np.int64), p)
    if list(c2) != [c ^ 1 for c in reversed(list(c1))]:
        raise LabelMismatch("arc labels are not mutually inverse")
    v1 = arc_vertices(d1, s1, l1)
    v2 = arc_vertices(d2, s2, l2)
    b = DiagramBuilder()
    m1 = b.absorb(d1)
    m2 = b.absorb(d2)
    if v1:
        b.identify(m1[np.array(v1)], m2[np.array(v2[::-1])])
    return b.build(int(m1[d1.base]), dict(d1.meta))


def relabel_isomorphic(d1: Diagram, d2: Diagram) -> bool:
    """Label-preserving isomorphism test by face-walk canonical forms from the basepoint."""
    def signature(d: Diagram):
        tw = d.twin
        nd = d.next_dart
        walk = d.boundary_walk()
        if not walk:
            return (d.n_vertices, d.n_faces)
        # breadth-first relabeling of darts from the first boundary dart's twin-free face
        order = {}
        queue = [walk[0]]
        while queue:
            x = queue.pop()
            if x in order:
                continue
            # claim the whole face cycle
            y = x
            while True:
                order[y] = len(order)
                y = int(nd[y])
                if y == x:
                    break
            y = x
            while True:
                if tw[y] >= 0 and int(tw[y]) not in order:
                    queue.append(int(tw[y]))
                y = int(nd[y])
                if y == x:
                    break
        inv = sorted(order, key=order.get)
        return tuple((int(d.code[x]), order.get(int(tw[x]), -1) if tw[x] >= 0 else -1,
                      order[int(nd[x])]) for x in inv)
    return signature(d1) == signature(d2)
