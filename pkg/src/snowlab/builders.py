"""Triangle, canonical, doubled canonical and snowflake diagrams, plus their exact sizes."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .aut import PHI, FreeAut, cached_power, codes_of, fapply, finv, freduce, transition
from .diagram import Diagram, DiagramBuilder, encode_parts
from .exactnum import QuadNum, mat_pow
from .treegeom import SnowTree, build_snowtree, nxt, triple
from .words import Word, is_monotone, is_palindromic, parse_word

MAX_FACES = 10 ** 6


class NotPalindromic(ValueError):
    pass


class NotMonotone(ValueError):
    pass


class TooLarge(RuntimeError):
    """The diagram would exceed the materialization cap; the closed-form report is attached."""

    def __init__(self, msg: str, report: SnowflakeReport):
        super().__init__(msg)
        self.report = report


def _as_codes(w) -> tuple:
    if isinstance(w, str):
        w = parse_word(w)
    if isinstance(w, Word):
        return freduce(codes_of(w))
    return freduce(tuple(w))


def _check_palindromic(c: tuple) -> None:
    # tau(w) == w^-1 letter for letter
    if tuple(-v for v in c) != finv(c):
        raise NotPalindromic("the word is not palindromic")


def _letter_arrays(c: tuple):
    arr = np.asarray(c, dtype=np.int64)
    is_y = np.abs(arr) == 2
    sign = np.sign(arr)
    return is_y, sign


def _codes_for(is_y: np.ndarray, sign: np.ndarray, index: int, xy: bool = True) -> np.ndarray:
    """Dart codes for letters of kinds x/y (or a/b) at one index."""
    k1, k2 = ("x", "y") if xy else ("a", "b")
    cx = encode_parts(k1, index, sign)
    cy = encode_parts(k2, index, sign)
    return np.where(is_y, cy, cx)


# ----------------------------------------------------------------- triangle diagrams

@dataclass
class _Tri:
    grid: np.ndarray  # (l+1, l+1) vertex ids, used where q <= p

    @property
    def length(self) -> int:
        return self.grid.shape[0] - 1

    def spoke_low(self) -> np.ndarray:
        """Spoke of x_k from the center outwards: (l, 0), (l-1, 0), ..., (0, 0)."""
        return self.grid[::-1, 0]

    def spoke_high(self) -> np.ndarray:
        """Spoke of x_{k+1} from the center outwards: (l, 0), ..., (l, l)."""
        return self.grid[-1, :]

    def hyp(self) -> np.ndarray:
        return np.diagonal(self.grid).copy()


def _triangle_into(b: DiagramBuilder, c: tuple, k: int) -> _Tri:
    """Grid [0,l]^2 below the diagonal: horizontal edges read tau(w) in x_k, vertical edges w in x_{k+1}."""
    l = len(c)
    G = b.new_vertices((l + 1) * (l + 1)).reshape(l + 1, l + 1)
    if l == 0:
        return _Tri(G)
    is_y, s = _letter_arrays(c)
    k1 = nxt(k)
    # 1-based arrays: H[p], V[q], D[p]
    H = np.concatenate([[0], _codes_for(is_y, -s, k)])
    V = np.concatenate([[0], _codes_for(is_y, s, k1)])
    D = np.concatenate([[0], _codes_for(is_y, s, k, xy=False)])
    p = np.arange(1, l + 1)
    b.add_faces(np.stack([G[p - 1, p - 1], G[p, p], G[p, p - 1]], axis=1),
                np.stack([D[p], V[p] ^ 1, H[p] ^ 1], axis=1), "triangle")
    pp, qq = np.nonzero(np.tri(l + 1, l + 1, -1, dtype=bool))  # q < p
    mask = qq >= 1
    pp, qq = pp[mask], qq[mask]
    if len(pp) == 0:
        return _Tri(G)
    A, B, C, Dv = G[pp - 1, qq - 1], G[pp - 1, qq], G[pp, qq], G[pp, qq - 1]
    Hp, Vq = H[pp], V[qq]
    typ_p, typ_q = is_y[pp - 1], is_y[qq - 1]
    sp, sq = s[pp - 1], s[qq - 1]
    quad = typ_p != typ_q
    b.add_faces(np.stack([A, B, C, Dv], axis=1)[quad],
                np.stack([Vq, Hp, Vq ^ 1, Hp ^ 1], axis=1)[quad], "quad")
    same = ~quad & (sp == sq)
    if same.any():
        diag = _codes_for(typ_p[same], sp[same], k, xy=False)
        b.add_faces(np.stack([A[same], B[same], C[same]], axis=1),
                    np.stack([Vq[same], Hp[same], diag ^ 1], axis=1), "triangle")
        b.add_faces(np.stack([A[same], C[same], Dv[same]], axis=1),
                    np.stack([diag, Vq[same] ^ 1, Hp[same] ^ 1], axis=1), "triangle")
    cross = ~quad & (sp != sq)
    if cross.any():
        anti = _codes_for(typ_q[cross], -sq[cross], k, xy=False)
        b.add_faces(np.stack([A[cross], B[cross], Dv[cross]], axis=1),
                    np.stack([Vq[cross], anti, Hp[cross] ^ 1], axis=1), "triangle")
        b.add_faces(np.stack([B[cross], C[cross], Dv[cross]], axis=1),
                    np.stack([Hp[cross], Vq[cross] ^ 1, anti ^ 1], axis=1), "triangle")
    return _Tri(G)


def triangle_diagram(w, i: int = 0) -> Diagram:
    """Boundary from the hypotenuse corner: w(a_i, b_i), then w(x_{i+1}, y_{i+1})^-1, then w(x_i, y_i)."""
    c = _as_codes(w)
    _check_palindromic(c)
    b = DiagramBuilder()
    t = _triangle_into(b, c, i)
    return b.build(int(t.grid[0, 0]), {"kind": "triangle", "word": c, "corner": i})


def triangle_faces(c: tuple) -> int:
    nx = sum(1 for v in c if abs(v) == 1)
    ny = len(c) - nx
    return _tri_faces_counts(nx, ny)


def _tri_faces_counts(nx: int, ny: int) -> int:
    # monotone words: same-type pairs split in two triangles, mixed pairs are one quad
    return nx + ny + 2 * (comb(nx, 2) + comb(ny, 2)) + nx * ny


# ----------------------------------------------------------------- canonical diagrams

def _canonical_into(b: DiagramBuilder, c: tuple, T: SnowTree) -> dict[int, np.ndarray]:
    """Pinwheel of three triangle diagrams per vertex, glued along internal sides.

    Returns the boundary arc (vertex ids, clockwise) reading w(a_nu, b_nu) for every peripheral nu.
    """
    tris = {}
    for v in range(T.n_vertices):
        for k in triple(v):
            tris[k] = _triangle_into(b, c, k)
        for k in triple(v):
            b.identify(tris[k].spoke_high(), tris[nxt(k)].spoke_low())
    for u, v, i, j in T.edges:
        b.identify(tris[i].hyp(), tris[j].hyp()[::-1])
    return {nu: tris[nu].hyp() for nu in T.peripherals}


def _prepare(w, T, need_monotone: bool = False) -> tuple[tuple, SnowTree]:
    c = _as_codes(w)
    _check_palindromic(c)
    if need_monotone and len({v > 0 for v in c}) > 1:
        raise NotMonotone("the word is not monotone")
    if T is None or isinstance(T, (dict, list, str)):
        T = build_snowtree(T)
    return c, T


def canonical_diagram(w, T: SnowTree | None = None) -> Diagram:
    c, T = _prepare(w, T)
    b = DiagramBuilder()
    arcs = _canonical_into(b, c, T)
    return b.build(int(arcs[T.peripherals[0]][0]), {"kind": "canonical", "word": c})


def _doubled_into(b: DiagramBuilder, c: tuple, T: SnowTree) -> list[tuple]:
    """Two canonical diagrams glued along w(a_nu0, b_nu0); returns the boundary pieces in order."""
    a1 = _canonical_into(b, c, T)
    a2 = _canonical_into(b, finv(c), T)
    nu = T.peripherals
    b.identify(a1[nu[0]], a2[nu[0]][::-1])
    pieces = [("sub", k, 1, a1[nu[k]]) for k in range(1, T.m + 1)]
    pieces += [("sub", k, -1, a2[nu[k]]) for k in range(1, T.m + 1)]
    return pieces


def doubled_canonical(w, T: SnowTree | None = None) -> Diagram:
    c, T = _prepare(w, T)
    b = DiagramBuilder()
    pieces = _doubled_into(b, c, T)
    return b.build(int(pieces[0][3][0]), {"kind": "doubled", "word": c})


# ----------------------------------------------------------------- snowflakes

def _strip_into(b: DiagramBuilder, u: tuple, long_side: np.ndarray, i: int, T: SnowTree,
                fwd: tuple) -> np.ndarray:
    """r_i-corridor whose long side is glued to `long_side` (reading psi(u) in a_nu_i)
    and whose short side, returned as vertex ids, reads u in a_nu0."""
    nu0, nui = T.peripherals[0], T.peripherals[i]
    q = b.new_vertices(len(u) + 1)
    r_plus = int(encode_parts("r", i, 1))
    imgs = {1: fapply(fwd, (1,)), -1: fapply(fwd, (-1,)), 2: fapply(fwd, (2,)), -2: fapply(fwd, (-2,))}
    pos = 0
    for t, letter in enumerate(u):
        img = imgs[letter]
        blk = long_side[pos:pos + len(img) + 1]
        is_y, s = _letter_arrays(img)
        blk_codes = _codes_for(is_y, s, nui, xy=False)
        ly, ls = _letter_arrays((letter,))
        short = int(_codes_for(ly, ls, nu0, xy=False)[0])
        cyc = [blk[0], q[t], q[t + 1]] + list(blk[1:][::-1])
        codes = [r_plus, short, r_plus ^ 1] + list((blk_codes ^ 1)[::-1])
        b.add_face(cyc, codes, "r")
        pos += len(img)
    if pos != len(long_side) - 1:
        raise AssertionError("long side does not match the image word")
    return q


def _snowflake_into(b: DiagramBuilder, c: tuple, d: int, T: SnowTree, n: int, phi: FreeAut) -> list[tuple]:
    fwd = cached_power(phi, n).codes
    if d == 0:
        return _doubled_into(b, c, T)
    center = _snowflake_into(b, fapply(fwd, c), d - 1, T, n, phi)
    out = []
    for piece in center:
        if piece[0] == "r":
            out.append(piece)
            continue
        _, i, eps, verts = piece
        u = c if eps > 0 else finv(c)
        q = _strip_into(b, u, verts, i, T, fwd)
        arcs = _canonical_into(b, finv(u), T)
        b.identify(arcs[T.peripherals[0]], q[::-1])
        out.append(("r", i, 1, np.array([verts[0], q[0]])))
        out += [("sub", k, -eps, arcs[T.peripherals[k]]) for k in range(1, T.m + 1)]
        out.append(("r", i, -1, np.array([q[-1], verts[-1]])))
    return out


@dataclass
class SnowflakeReport:
    depth: int
    perimeter: int
    weighted_perimeter: QuadNum | float
    area: int
    r_count: int
    subwords_per_level: list[int]
    faces: int
    materialized: bool = False
    word_lengths: list[int] = field(default_factory=list)
    r_count_claim: int | None = None  # the 4 m^(d-1) figure, compared but not enforced

    @property
    def r_count_discrepancy(self) -> bool:
        return self.r_count_claim is not None and self.r_count != self.r_count_claim

    @property
    def lower_bound_ok(self) -> bool:
        return self.r_count_claim is None or self.perimeter >= self.r_count_claim

    def as_row(self) -> dict:
        return {"depth": self.depth, "perimeter": self.perimeter, "weighted_perimeter": float(self.weighted_perimeter),
                "area": self.area, "r_count": self.r_count, "faces": self.faces,
                "materialized": self.materialized}


def snowflake_sizes(w, d: int, T: SnowTree | None = None, n: int = 1, phi: FreeAut = PHI) -> SnowflakeReport:
    """Exact sizes of the snowflake by recurrence; letter counts via powers of the transition matrix."""
    c, T = _prepare(w, T, need_monotone=True)
    ed = transition(phi)
    M = ed.matrix
    m = T.m
    counts = (sum(1 for v in c if abs(v) == 1), sum(1 for v in c if abs(v) == 2))
    lv = [mat_pow(M, k * n).apply(counts) for k in range(d + 1)]  # letter counts of phi^{kn}(w)
    lens = [a + bb for a, bb in lv]
    S = [2 * m ** (j + 1) for j in range(d + 1)]
    # innermost doubled canonical of phi^{dn}(w), then layers outward
    nx, ny = lv[d]
    area = 6 * T.n_vertices * lens[d] ** 2
    faces = 6 * T.n_vertices * _tri_faces_counts(nx, ny)
    r = 0
    for j in range(1, d + 1):  # building Delta(phi^{(d-j)n} w, j) from level j-1
        lw = lens[d - j]
        nx, ny = lv[d - j]
        area += S[j - 1] * (lw + 3 * T.n_vertices * lw ** 2)
        faces += S[j - 1] * (lw + 3 * T.n_vertices * _tri_faces_counts(nx, ny))
        r += 2 * S[j - 1]
    d1, d2 = ed.left_vector
    wl = d1 * counts[0] + d2 * counts[1]
    return SnowflakeReport(
        depth=d, perimeter=S[d] * lens[0] + r, weighted_perimeter=S[d] * wl + r, area=area, r_count=r,
        subwords_per_level=S, faces=faces, materialized=False, word_lengths=lens,
        r_count_claim=4 * m ** (d - 1) if d >= 1 else None)


def snowflake(w, d: int, T: SnowTree | None = None, n: int = 1, phi: FreeAut = PHI,
              materialize: bool = True, max_faces: int = MAX_FACES) -> tuple[Diagram | None, SnowflakeReport]:
    c, T = _prepare(w, T, need_monotone=True)
    if not c:
        raise ValueError("the snowflake needs a nonempty word")
    if not (phi.monotone and phi.palindromic):
        raise NotMonotone("the automorphism must be monotone and palindromic")
    rep = snowflake_sizes(c, d, T, n, phi)
    if not materialize:
        return None, rep
    if rep.faces > max_faces:
        raise TooLarge(f"snowflake would have {rep.faces} faces (cap {max_faces})", rep)
    b = DiagramBuilder()
    pieces = _snowflake_into(b, c, d, T, n, phi)
    first = pieces[0][3][0]
    diag = b.build(int(first), {"kind": "snowflake", "word": c, "depth": d, "n": n, "pieces": len(pieces)})
    from .diagram import area as _area, boundary_kind_count, perimeter
    measured = SnowflakeReport(
        depth=d, perimeter=perimeter(diag), weighted_perimeter=_weighted_perimeter(diag, phi),
        area=_area(diag), r_count=boundary_kind_count(diag, "r"),
        subwords_per_level=rep.subwords_per_level, faces=diag.n_faces, materialized=True,
        word_lengths=rep.word_lengths, r_count_claim=rep.r_count_claim)
    return diag, measured


def _weighted_perimeter(d: Diagram, phi: FreeAut):
    from .diagram import KIND_ID
    ed = transition(phi)
    d1, d2 = ed.left_vector
    kinds = d.code[d.boundary_darts] >> 21
    na = int(np.count_nonzero((kinds == KIND_ID["a"]) | (kinds == KIND_ID["x"])))
    nb = int(np.count_nonzero((kinds == KIND_ID["b"]) | (kinds == KIND_ID["y"])))
    rest = len(kinds) - na - nb
    return d1 * na + d2 * nb + rest


def snowflake_boundary_pieces(w, d: int, T: SnowTree | None = None, n: int = 1, phi: FreeAut = PHI) -> list[tuple]:
    """(kind, index, sign) of each boundary piece of the snowflake, in boundary order, without faces."""
    c, T = _prepare(w, T, need_monotone=True)
    pieces = [("sub", k, 1) for k in range(1, T.m + 1)] + [("sub", k, -1) for k in range(1, T.m + 1)]
    for _ in range(d):
        out = []
        for kind, i, eps in pieces:
            if kind == "r":
                out.append((kind, i, eps))
            else:
                out += [("r", i, 1)] + [("sub", k, -eps) for k in range(1, T.m + 1)] + [("r", i, -1)]
        pieces = out
    return pieces
