"""Word problems: free-by-cyclic normal forms, tree amalgams and Britton reduction."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any

from .aut import PHI, FreeAut, cached_power, codes_of, fapply, finv, fmul, freduce, ftau, word_of
from .treegeom import SnowTree, build_snowtree, nxt, triple
from .words import AlphabetError, Letter, Word


class WrongVertex(ValueError):
    """A peripheral index that is not in the vertex group at hand."""


# ----------------------------------------------------------------- factor groups

class FreeFactor:
    """F = <x, y>; elements are reduced int codes."""

    one: tuple = ()
    kinds = "xyab"

    @staticmethod
    def mul(p, q):
        return fmul(p, q)

    @staticmethod
    def inv(p):
        return finv(p)

    @staticmethod
    def tau(p):
        return ftau(p)

    def gen(self, kind: str):
        return (1,) if kind in "xa" else (2,)

    def to_letters(self, g, index: int, xk="x", yk="y", tk="t") -> list[Letter]:
        return list(word_of(g, xk, yk, index).letters)

    def from_word(self, w: Word):
        return freduce(codes_of(w))


class CyclicFactor:
    """G = F x|_psi <t> with psi = phi^n; elements (k, u) stand for t^k u."""

    one: tuple = (0, ())
    kinds = "xyabtc"

    def __init__(self, n: int = 1, phi: FreeAut = PHI):
        self.n = n
        self.phi = phi
        self.fwd = cached_power(phi, n).codes
        self.bwd = cached_power(phi, -n).codes

    def shift(self, u, k: int):
        """psi^k(u)."""
        images = self.fwd if k > 0 else self.bwd
        for _ in range(abs(k)):
            u = fapply(images, u)
        return u

    def mul(self, p, q):
        (k1, u1), (k2, u2) = p, q
        return (k1 + k2, fmul(self.shift(u1, -k2), u2))

    def inv(self, p):
        k, u = p
        return (-k, self.shift(finv(u), k))

    @staticmethod
    def tau(p):
        return (p[0], ftau(p[1]))

    def gen(self, kind: str):
        if kind in "tc":
            return (1, ())
        return (0, (1,) if kind in "xa" else (2,))

    def to_letters(self, g, index: int, xk="x", yk="y", tk="t") -> list[Letter]:
        k, u = g
        s = 1 if k > 0 else -1
        return [Letter(tk, index, s)] * abs(k) + list(word_of(u, xk, yk, index).letters)

    def from_word(self, w: Word):
        return _g_codes(w, self)


def _g_codes(w: Word, G: CyclicFactor):
    k, u = 0, ()
    for l in w.letters:
        if l.kind in "tc":
            # t^k u t = t^{k+1} psi^{-1}(u), t^k u t^-1 = t^{k-1} psi(u)
            k += l.sign
            u = G.shift(u, -l.sign)
        elif l.kind in "xyab":
            v = 1 if l.kind in "xa" else 2
            u = fmul(u, (v * l.sign,))
        else:
            raise AlphabetError(f"letter {l} is not in <x, y, t>")
    return (k, u)


@lru_cache(maxsize=64)
def cyclic_factor(n: int, phi: FreeAut) -> CyclicFactor:
    return CyclicFactor(n, phi)


# ----------------------------------------------------------------- free-by-cyclic

@dataclass(frozen=True)
class GNormalForm:
    k: int
    u: Word

    def word(self, index: int = 0) -> Word:
        s = 1 if self.k > 0 else -1
        return Word([Letter("t", index, s)] * abs(self.k) + [Letter(l.kind, index, l.sign) for l in self.u])

    @property
    def is_identity(self) -> bool:
        return self.k == 0 and not self.u.letters

    def __str__(self) -> str:
        from .words import format_word
        return f"t^{self.k} {format_word(self.u) or '1'}"


def g_normalize(w: Word, n: int = 1, phi: FreeAut = PHI) -> GNormalForm:
    """The unique t^k u equal to w in F x|_{phi^n} <t>."""
    k, u = _g_codes(w, cyclic_factor(n, phi))
    return GNormalForm(k, word_of(u))


def g_mul(p: GNormalForm, q: GNormalForm, n: int = 1, phi: FreeAut = PHI) -> GNormalForm:
    G = cyclic_factor(n, phi)
    k, u = G.mul((p.k, codes_of(p.u)), (q.k, codes_of(q.u)))
    return GNormalForm(k, word_of(u))


# ----------------------------------------------------------------- vertex groups

@dataclass(frozen=True)
class VertexElement:
    """An element of V = F_i x F_j x F_k (or G_i x G_j x G_k) at one tree vertex."""

    vertex: int
    coords: tuple  # three Words, or three GNormalForms


def _coord_elem(c, factor):
    if isinstance(c, GNormalForm):
        return (c.k, freduce(codes_of(c.u)))
    return factor.from_word(c)


def _member(factor, g, i: int):
    """z with g = (tau z, z, 1) in the coordinates (i, i+1, i+2), else None."""
    r, r1, r2 = i % 3, (i + 1) % 3, (i + 2) % 3
    if g[r2] != factor.one:
        return None
    q = g[r1]
    return q if g[r] == factor.tau(q) else None


def _embed(factor, z, i: int) -> tuple:
    out = [factor.one] * 3
    out[i % 3] = factor.tau(z)
    out[(i + 1) % 3] = z
    return tuple(out)


def _mul3(factor, g, h) -> tuple:
    one = factor.one
    return tuple(a if b == one else b if a == one else factor.mul(a, b) for a, b in zip(g, h))


def _inv3(factor, g) -> tuple:
    return tuple(factor.inv(a) for a in g)


def peripheral_membership(v: VertexElement, i: int):
    """Word z(a_i, b_i) (with c_i powers in the cyclic case) when v lies in A_i, else None."""
    if i not in triple(v.vertex):
        raise WrongVertex(f"index {i} is not a side of vertex {v.vertex}")
    cyclic = any(isinstance(c, GNormalForm) for c in v.coords)
    factor = cyclic_factor(1, PHI) if cyclic else FreeFactor()
    g = tuple(_coord_elem(c, factor) for c in v.coords)
    z = _member(factor, g, i)
    if z is None:
        return None
    return Word(factor.to_letters(z, i, "a", "b", "c"))


# ----------------------------------------------------------------- tree amalgams

@dataclass(frozen=True)
class AmalgamForm:
    """Canonical reduced syllable sequence ((vertex, coordinate triple), ...)."""

    syllables: tuple
    factor: Any = None

    @property
    def is_identity(self) -> bool:
        return not self.syllables

    def __len__(self) -> int:
        return len(self.syllables)

    def word(self) -> Word:
        out: list[Letter] = []
        for v, g in self.syllables:
            for r, c in enumerate(g):
                out += self.factor.to_letters(c, 3 * v + r)
        return Word(out)

    def vertex_elements(self) -> list[VertexElement]:
        res = []
        for v, g in self.syllables:
            if isinstance(self.factor, CyclicFactor):
                coords = tuple(GNormalForm(k, word_of(u, index=3 * v + r)) for r, (k, u) in enumerate(g))
            else:
                coords = tuple(word_of(c, index=3 * v + r) for r, c in enumerate(g))
            res.append(VertexElement(v, coords))
        return res

    def __eq__(self, other) -> bool:
        return isinstance(other, AmalgamForm) and self.syllables == other.syllables

    def __hash__(self) -> int:
        return hash(self.syllables)

    def __str__(self) -> str:
        from .words import format_word
        return format_word(self.word()) or "1"


class TreeAmalgam:
    """Reduced forms in the tree of groups over T with factor F (for V_T) or G (for W_T)."""

    def __init__(self, T: SnowTree, factor):
        self.T = T
        self.f = factor
        self.one3 = (factor.one,) * 3
        self.side = {}
        self._syll: dict[Letter, tuple[int, tuple]] = {}
        for u, v, i, j in T.edges:
            self.side[(u, v)] = (i, j)
            self.side[(v, u)] = (j, i)

    # letters
    def letter_syllable(self, l: Letter) -> tuple[int, tuple]:
        hit = self._syll.get(l)
        if hit is None:
            hit = self._syll[l] = self._letter_syllable(l)
        return hit

    def _letter_syllable(self, l: Letter) -> tuple[int, tuple]:
        if l.kind not in self.f.kinds:
            raise AlphabetError(f"letter {l} is not a vertex-group letter here")
        if l.index < 0 or l.index >= 3 * self.T.n_vertices:
            raise AlphabetError(f"letter {l} has no vertex in this tree")
        v, r = divmod(l.index, 3)
        g = [self.f.one] * 3
        e = self.f.gen(l.kind)
        if l.kind in "xyt":
            g[r] = e
        else:  # a, b, c live on two coordinates
            g[r] = e if l.kind == "c" else self.f.inv(e)
            g[(r + 1) % 3] = e
        g = tuple(g)
        if l.sign < 0:
            g = _inv3(self.f, g)
        return v, g

    def normalize(self, w: Word) -> AmalgamForm:
        return self.normalize_syllables(self.letter_syllable(l) for l in w.letters)

    def normalize_syllables(self, sylls) -> AmalgamForm:
        f = self.f
        stack: list[list] = []

        def push(v: int, g: tuple) -> None:
            if not stack:
                stack.append([v, g])
                return
            u = stack[-1][0]
            if u == v:
                stack[-1][1] = _mul3(f, stack[-1][1], g)
                return
            if (u, v) not in self.side:
                path = self.T.vertex_path(u, v)
                for x in path[1:-1]:
                    push(x, self.one3)
                push(v, g)
                return
            if len(stack) >= 2 and stack[-2][0] == v:
                i, j = self.side[(u, v)]
                z = _member(f, stack[-1][1], i)
                if z is not None:
                    stack.pop()
                    h = _embed(f, f.tau(z), j)
                    stack[-1][1] = _mul3(f, _mul3(f, stack[-1][1], h), g)
                    return
            stack.append([v, g])

        for v, g in sylls:
            push(v, g)
        self._clean_ends(stack)
        self._coset_normalize(stack)
        if len(stack) == 1:
            stack[0] = list(self._least_vertex(*stack[0]))
        return AmalgamForm(tuple((v, g) for v, g in stack), f)

    def _clean_ends(self, stack: list) -> None:
        f = self.f
        while stack:
            if stack[-1][1] == self.one3:
                stack.pop()
                continue
            if stack[0][1] == self.one3:
                stack.pop(0)
                continue
            if len(stack) >= 2:
                u, v = stack[-1][0], stack[-2][0]
                i, j = self.side[(u, v)]
                z = _member(f, stack[-1][1], i)
                if z is not None:
                    stack.pop()
                    stack[-1][1] = _mul3(f, stack[-1][1], _embed(f, f.tau(z), j))
                    continue
                u, v = stack[0][0], stack[1][0]
                i, j = self.side[(u, v)]
                z = _member(f, stack[0][1], i)
                if z is not None:
                    stack.pop(0)
                    stack[0][1] = _mul3(f, _embed(f, f.tau(z), j), stack[0][1])
                    continue
            break

    def _coset_normalize(self, stack: list) -> None:
        f = self.f
        for l in range(len(stack) - 1):
            v, g = stack[l]
            u = stack[l + 1][0]
            i, j = self.side[(v, u)]
            q = g[(i + 1) % 3]
            if q == f.one:
                continue
            h = _embed(f, q, i)
            stack[l][1] = _mul3(f, g, _inv3(f, h))
            stack[l + 1][1] = _mul3(f, _embed(f, f.tau(q), j), stack[l + 1][1])

    def _least_vertex(self, v: int, g: tuple) -> tuple[int, tuple]:
        best = (v, g)
        for u, i, j in self.T.neighbors[v]:
            z = _member(self.f, g, i)
            if z is not None and u < best[0]:
                best = (u, _embed(self.f, self.f.tau(z), j))
        return best

    def transport(self, form: AmalgamForm, side: int):
        """z with the element equal to z read in A_side, or None."""
        if form.is_identity:
            return self.f.one
        if len(form.syllables) != 1:
            return None
        v, g = form.syllables[0]
        target = side // 3
        path = self.T.vertex_path(v, target)
        for a, b in zip(path, path[1:]):
            i, j = self.side[(a, b)]
            z = _member(self.f, g, i)
            if z is None:
                return None
            g = _embed(self.f, self.f.tau(z), j)
        return _member(self.f, g, side)


@lru_cache(maxsize=64)
def _vt_engine(T: SnowTree) -> TreeAmalgam:
    return TreeAmalgam(T, FreeFactor())


@lru_cache(maxsize=64)
def _wt_engine(T: SnowTree, n: int, phi: FreeAut) -> TreeAmalgam:
    return TreeAmalgam(T, cyclic_factor(n, phi))


def vt_normalize(w: Word, T: SnowTree | None = None) -> AmalgamForm:
    return _vt_engine(T or build_snowtree()).normalize(w)


def wt_normalize(w: Word, T: SnowTree | None = None, n: int = 1, phi: FreeAut = PHI) -> AmalgamForm:
    return _wt_engine(T or build_snowtree(), n, phi).normalize(w)


def reduced_peripheral_word(w: Word, i: int, T: SnowTree | None = None) -> Word | None:
    """z(a_i, b_i) reduced, when w lies in A_i, else None."""
    eng = _vt_engine(T or build_snowtree())
    z = eng.transport(eng.normalize(w), i)
    if z is None:
        return None
    return word_of(z, "a", "b", i)


def membership_profile(w: Word, T: SnowTree | None = None, sides=None) -> dict[int, tuple | None]:
    """Side -> reduced code of z with w = z(a_side, b_side), or None; normalizes w once."""
    T = T or build_snowtree()
    eng = _vt_engine(T)
    f = eng.normalize(w)
    return {i: eng.transport(f, i) for i in (range(3 * T.n_vertices) if sides is None else sides)}


# ----------------------------------------------------------------- Britton reduction

@dataclass(frozen=True)
class BrittonForm:
    segments: tuple  # AmalgamForms, one more than the stable letters
    stables: tuple  # Letters

    @property
    def is_identity(self) -> bool:
        return not self.stables and self.segments[0].is_identity

    @property
    def stable_length(self) -> int:
        return len(self.stables)

    def word(self) -> Word:
        out = list(self.segments[0].word().letters)
        for s, seg in zip(self.stables, self.segments[1:]):
            out.append(s)
            out += seg.word().letters
        return Word(out)

    def __str__(self) -> str:
        from .words import format_word
        return format_word(self.word()) or "1"


class MultipleHNN:
    """Pinch rewriting for S (over V_T), G in s-coordinates and G in u-coordinates (over W_T)."""

    def __init__(self, kind: str, T: SnowTree, n: int, phi: FreeAut):
        self.kind = kind
        self.T = T
        self.stable = {"S": "r", "G_s": "s", "G_u": "u"}[kind]
        if kind == "S":
            self.eng = _vt_engine(T)
            fwd, bwd = cached_power(phi, n).codes, cached_power(phi, -n).codes
            self.plus = lambda z: fapply(fwd, z)
            self.minus = lambda z: fapply(bwd, z)
        else:
            self.eng = _wt_engine(T, n, phi)
            if kind == "G_s":
                self.plus = self.minus = lambda z: z
            else:
                fwd, bwd = cached_power(phi, n).codes, cached_power(phi, -n).codes
                self.plus = lambda z: (z[0], fapply(fwd, z[1]))
                self.minus = lambda z: (z[0], fapply(bwd, z[1]))

    def _z_word(self, z, idx: int) -> list[Letter]:
        return self.eng.f.to_letters(z, idx, "a", "b", "c")

    def normalize(self, w: Word) -> BrittonForm:
        m = self.T.m
        nus = self.T.peripherals
        stables: list[Letter] = []
        segs: list[list[Letter]] = [[]]
        for l in w.letters:
            if l.kind in "rsu":
                if l.kind != self.stable or not 1 <= l.index <= m:
                    raise AlphabetError(f"stable letter {l} does not belong here")
                form = self.eng.normalize(Word(segs[-1]))
                prev = stables[-1] if stables else None
                if prev is not None and prev.index == l.index and prev.sign == -l.sign:
                    i = l.index
                    if prev.sign > 0:  # r_i v r_i^-1 with v in A_nu0
                        z = self.eng.transport(form, nus[0])
                        img = None if z is None else self._z_word(self.plus(z), nus[i])
                    else:  # r_i^-1 v r_i with v in A_nu_i
                        z = self.eng.transport(form, nus[i])
                        img = None if z is None else self._z_word(self.minus(z), nus[0])
                    if img is not None:
                        stables.pop()
                        segs.pop()
                        segs[-1] = list(self.eng.normalize(Word(segs[-1] + img)).word().letters)
                        continue
                segs[-1] = list(form.word().letters)
                stables.append(l)
                segs.append([])
            else:
                segs[-1].append(l)
        forms = tuple(self.eng.normalize(Word(s)) for s in segs)
        return BrittonForm(forms, tuple(stables))


@lru_cache(maxsize=64)
def _hnn(kind: str, T: SnowTree, n: int, phi: FreeAut) -> MultipleHNN:
    return MultipleHNN(kind, T, n, phi)


def britton_normalize(w: Word, p) -> BrittonForm:
    if p.kind not in ("S", "G_s", "G_u"):
        raise ValueError(f"no HNN structure for a {p.kind} presentation")
    return _hnn(p.kind, p.tree, p.n, p.phi).normalize(w)


def is_trivial(w: Word, p) -> bool:
    if p.kind == "V_T":
        return vt_normalize(w, p.tree).is_identity
    if p.kind == "W_T":
        return wt_normalize(w, p.tree, p.n, p.phi).is_identity
    return britton_normalize(w, p).is_identity


def normal_form(w: Word, p):
    """The engine's form for w in p (AmalgamForm or BrittonForm)."""
    if p.kind == "V_T":
        return vt_normalize(w, p.tree)
    if p.kind == "W_T":
        return wt_normalize(w, p.tree, p.n, p.phi)
    return britton_normalize(w, p)
