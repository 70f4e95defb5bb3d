"""Finite presentations of V, V_T, W_T, S_{T,n}, G_{T,n} and the maps between them."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .aut import PHI, FreeAut, cached_power, format_free
from .treegeom import SnowTree, build_snowtree, nxt, triple
from .words import AlphabetError, Letter, Word, format_word, parse_word, reletter, substitute

AREA = {"triangle": 1, "quad": 2, "r": 1, "s": 1, "u": 1, "G": 1}


def L(kind: str, index: int, sign: int = 1) -> Letter:
    return Letter(kind, index, sign)


def W(*letters: Letter) -> Word:
    return Word(letters)


@dataclass(frozen=True)
class Relator:
    word: Word
    ftype: str

    @property
    def area(self) -> int:
        return AREA[self.ftype]


@dataclass(frozen=True)
class Presentation:
    """Generators, typed relators and metadata; `kind` selects the word-problem engine.

    `aliases` sends the higher-index name of a glued edge to the lower one with a sign,
    so a_j -> (("a", i), -1) records that the single edge labeled a_i also reads a_j backwards.
    """

    kind: str
    generators: tuple[tuple[str, int], ...]
    relators: tuple[Relator, ...]
    tree: SnowTree
    n: int = 0
    phi: FreeAut = PHI
    internal: tuple[tuple[str, int], ...] = ()
    aliases: dict = field(default_factory=dict, hash=False, compare=False)
    extra_relations: tuple[Word, ...] = ()

    @property
    def m(self) -> int:
        return self.tree.m

    def all_labels(self) -> set[tuple[str, int]]:
        return set(self.generators) | set(self.internal) | set(self.aliases)

    def canonical(self, kind: str, index: int) -> tuple[tuple[str, int], int]:
        """The 1-cell carrying a label and the orientation of the label relative to it."""
        return self.aliases.get((kind, index), ((kind, index), 1))

    def validate_word(self, w: Word) -> None:
        labels = self.all_labels()
        for l in w.letters:
            if (l.kind, l.index) not in labels:
                raise AlphabetError(f"letter {l} is not a generator of this {self.kind} presentation")

    def area_of(self, ftype: str) -> int:
        return AREA[ftype]

    def to_json(self) -> dict:
        return {
            "generators": [f"{k}{i}" for k, i in self.generators],
            "internal": [f"{k}{i}" for k, i in self.internal],
            "relators": [{"word": format_word(r.word), "type": r.ftype} for r in self.relators],
            "amalgam_relations": [format_word(w) for w in self.extra_relations],
            "meta": {"kind": self.kind, "T": self.tree.to_json(), "n": self.n,
                     "phi": {"x": format_free(self.phi.image_x), "y": format_free(self.phi.image_y)}},
        }

    def relator_text(self) -> str:
        """Plain relator list: a generator line then one relator per line."""
        gens = [f"{k}{i}" for k, i in self.generators] + [f"{k}{i}" for k, i in self.internal]
        lines = ["# generators (capital letter = inverse)", " ".join(gens), "# relators"]
        lines += [format_word(r.word) for r in self.relators]
        lines += [format_word(w) for w in self.extra_relations]
        return "\n".join(lines) + "\n"


def _vertex_relators(v: int) -> list[Relator]:
    out = []
    for i in triple(v):
        j = nxt(i)
        for k, p in (("x", "a"), ("y", "b")):
            out.append(Relator(W(L(k, i, -1), L(k, j), L(p, i, -1)), "triangle"))
            out.append(Relator(W(L(k, j), L(k, i, -1), L(p, i, -1)), "triangle"))
    for i in triple(v):
        j = nxt(i)
        out.append(Relator(W(L("x", i), L("y", j), L("x", i, -1), L("y", j, -1)), "quad"))
        out.append(Relator(W(L("x", j), L("y", i), L("x", j, -1), L("y", i, -1)), "quad"))
    return out


def _vt_parts(T: SnowTree):
    gens: list[tuple[str, int]] = []
    for v in range(T.n_vertices):
        for i in triple(v):
            gens += [("x", i), ("y", i)]
    for nu in T.peripherals:
        gens += [("a", nu), ("b", nu)]
    internal, aliases, amalg = [], {}, []
    for u, v, i, j in T.edges:
        lo, hi = min(i, j), max(i, j)
        for k in "ab":
            internal.append((k, lo))
            aliases[(k, hi)] = ((k, lo), -1)
            amalg.append(W(L(k, i), L(k, j)))
    return gens, internal, aliases, amalg


def presentation_V() -> Presentation:
    return presentation_VT(build_snowtree())


def presentation_VT(T: SnowTree) -> Presentation:
    gens, internal, aliases, amalg = _vt_parts(T)
    rels = [r for v in range(T.n_vertices) for r in _vertex_relators(v)]
    return Presentation("V_T", tuple(gens), tuple(rels), T, 0, PHI, tuple(sorted(internal)),
                        aliases, tuple(amalg))


def _image(phi: FreeAut, n: int, kind: str, index: int) -> Word:
    """phi^n applied to x (kind "a") or y (kind "b"), read in a_index, b_index."""
    p = cached_power(phi, n)
    src = p.image_x if kind == "a" else p.image_y
    return reletter(src, ("a", index), ("b", index))


def presentation_S(T: SnowTree, n: int = 1, phi: FreeAut = PHI) -> Presentation:
    if not (phi.monotone and phi.palindromic):
        raise ValueError("the automorphism must be monotone and palindromic")
    base = presentation_VT(T)
    nu0 = T.peripherals[0]
    rels = list(base.relators)
    for i in range(1, T.m + 1):
        nui = T.peripherals[i]
        for k in "ab":
            rels.append(Relator(W(L("r", i), L(k, nu0), L("r", i, -1)) * _image(phi, n, k, nui).inverse(), "r"))
    gens = base.generators + tuple(("r", i) for i in range(1, T.m + 1))
    return Presentation("S", gens, tuple(rels), T, n, phi, base.internal, base.aliases,
                        base.extra_relations)


def _w_vertex_relators(v: int, n: int, phi: FreeAut) -> list[Relator]:
    p = cached_power(phi, n)
    out = []
    for i in triple(v):
        for k, img in (("x", p.image_x), ("y", p.image_y)):
            rel = W(L("t", i), L(k, i), L("t", i, -1)) * reletter(img, ("x", i), ("y", i)).inverse()
            out.append(Relator(rel, "G"))
    for i, j in itertools.combinations(triple(v), 2):
        for g in "xyt":
            for h in "xyt":
                out.append(Relator(W(L(g, i), L(h, j), L(g, i, -1), L(h, j, -1)), "G"))
    for i in triple(v):
        j = nxt(i)
        for k, p_ in (("x", "a"), ("y", "b")):
            out.append(Relator(W(L(k, i, -1), L(k, j), L(p_, i, -1)), "G"))
        out.append(Relator(W(L("t", i), L("t", j), L("c", i, -1)), "G"))
    return out


def presentation_WT(T: SnowTree, n: int = 1, phi: FreeAut = PHI) -> Presentation:
    gens: list[tuple[str, int]] = []
    for v in range(T.n_vertices):
        for i in triple(v):
            gens += [("x", i), ("y", i), ("t", i)]
    for nu in T.peripherals:
        gens += [("a", nu), ("b", nu), ("c", nu)]
    rels = [r for v in range(T.n_vertices) for r in _w_vertex_relators(v, n, phi)]
    internal = []
    for u, v, i, j in T.edges:
        internal += [("a", i), ("b", i), ("c", i), ("a", j), ("b", j), ("c", j)]
        rels += [Relator(W(L("a", i), L("a", j)), "G"), Relator(W(L("b", i), L("b", j)), "G"),
                 Relator(W(L("c", i), L("c", j, -1)), "G")]
    return Presentation("W_T", tuple(gens), tuple(rels), T, n, phi, tuple(sorted(internal)))


def presentation_G(T: SnowTree, n: int = 1, phi: FreeAut = PHI, coordinates: str = "s") -> Presentation:
    if coordinates not in ("s", "u"):
        raise ValueError("coordinates must be 's' or 'u'")
    base = presentation_WT(T, n, phi)
    nu0 = T.peripherals[0]
    rels = list(base.relators)
    st = coordinates
    for i in range(1, T.m + 1):
        nui = T.peripherals[i]
        for k in "abc":
            conj = W(L(st, i), L(k, nu0), L(st, i, -1))
            if st == "u" and k in "ab":
                target = _image(phi, n, k, nui)
            else:
                target = W(L(k, nui))
            rels.append(Relator(conj * target.inverse(), st))
    gens = base.generators + tuple((st, i) for i in range(1, T.m + 1))
    return Presentation("G_" + st, gens, tuple(rels), T, n, phi, base.internal)


@dataclass(frozen=True)
class GroupMap:
    source: Presentation
    target: Presentation
    images: dict = field(hash=False, compare=False)

    def image(self, kind: str, index: int) -> Word:
        return self.images.get((kind, index), W(L(kind, index)))

    def __call__(self, w: Word) -> Word:
        return substitute(w, self.images)

    def check(self) -> list[Relator]:
        """Source relators whose image is not trivial in the target (empty if sound)."""
        from .normalform import is_trivial
        return [r for r in self.source.relators if not is_trivial(self(r.word), self.target)]


def untwist(p: Presentation) -> tuple[Presentation, GroupMap, GroupMap]:
    """Trade s_i for u_i = c_{nu_i} s_i; returns the u-presentation, the s->u map and the u->s map."""
    if p.kind != "G_s":
        raise ValueError("untwist expects a presentation in s-coordinates")
    T = p.tree
    q = presentation_G(T, p.n, p.phi, "u")
    s_to_u, u_to_s = {}, {}
    for i in range(1, T.m + 1):
        c = L("c", T.peripherals[i])
        s_to_u[("s", i)] = W(c.inv(), L("u", i))
        u_to_s[("u", i)] = W(c, L("s", i))
    return q, GroupMap(p, q, s_to_u), GroupMap(q, p, u_to_s)


def embedding_map(T: SnowTree, n: int = 1, phi: FreeAut = PHI, coordinates: str = "u") -> GroupMap:
    """S_{T,n} -> G_{T,n}: identity on V_T generators and r_i -> u_i (or c_{nu_i} s_i)."""
    src = presentation_S(T, n, phi)
    tgt = presentation_G(T, n, phi, coordinates)
    images = {}
    for i in range(1, T.m + 1):
        if coordinates == "u":
            images[("r", i)] = W(L("u", i))
        else:
            images[("r", i)] = W(L("c", T.peripherals[i]), L("s", i))
    # internal V_T letters name the same elements as in W_T, nothing to substitute
    return GroupMap(src, tgt, images)


def standard_word(w: Word, T: SnowTree) -> Word:
    """w(a_nu0, b_nu0) w(a_nu1, b_nu1) ... w(a_num, b_num)."""
    out = Word()
    for nu in T.peripherals:
        out = out * reletter(w, ("a", nu), ("b", nu))
    return out


def parse_in(p: Presentation, text: str) -> Word:
    w = parse_word(text)
    p.validate_word(w)
    return w
