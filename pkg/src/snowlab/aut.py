"""Automorphisms of the free group F = <x, y>."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .exactnum import EigenPair, IntMatrix2, QuadNum, mat_pow, pf_eigendata
from .words import AlphabetError, Letter, Word, is_monotone, is_palindromic, parse_word

# internal encoding of F-words: tuples of nonzero ints, x = 1, y = 2, negative = inverse
FCode = tuple


class NotInvertible(ValueError):
    """No inverse was found within the search bounds."""


def codes_of(w: Word) -> FCode:
    out = []
    for l in w.letters:
        if l.kind in ("x", "a"):
            out.append(l.sign)
        elif l.kind in ("y", "b"):
            out.append(2 * l.sign)
        else:
            raise AlphabetError(f"letter {l} is not in <x, y>")
    return tuple(out)


def word_of(c: FCode, xk: str = "x", yk: str = "y", index: int = 0) -> Word:
    return Word(Letter(xk if abs(v) == 1 else yk, index, 1 if v > 0 else -1) for v in c)


def freduce(c) -> FCode:
    out: list[int] = []
    for v in c:
        if out and out[-1] == -v:
            out.pop()
        else:
            out.append(v)
    return tuple(out)


def finv(c: FCode) -> FCode:
    return tuple(-v for v in reversed(c))


def ftau(c: FCode) -> FCode:
    return tuple(-v for v in c)


def fmul(p: FCode, q: FCode) -> FCode:
    # cancel only at the seam; both inputs are reduced
    i = 0
    n = min(len(p), len(q))
    while i < n and p[len(p) - 1 - i] == -q[i]:
        i += 1
    return p[:len(p) - i] + q[i:]


def fapply(images: tuple[FCode, FCode], c: FCode) -> FCode:
    ix, iy = images
    ixi, iyi = finv(ix), finv(iy)
    table = {1: ix, -1: ixi, 2: iy, -2: iyi}
    out: list[int] = []
    for v in c:
        for u in table[v]:
            if out and out[-1] == -u:
                out.pop()
            else:
                out.append(u)
    return tuple(out)


def format_free(w: Word) -> str:
    return "".join((l.kind if l.sign > 0 else l.kind.upper()) for l in w.letters)


@dataclass(frozen=True)
class FreeAut:
    image_x: Word
    image_y: Word

    @classmethod
    def from_codes(cls, cx: FCode, cy: FCode) -> FreeAut:
        return cls(word_of(cx), word_of(cy))

    @classmethod
    def parse(cls, x: str, y: str) -> FreeAut:
        return cls(parse_word(x), parse_word(y))

    @classmethod
    def from_json(cls, text_or_obj) -> FreeAut:
        obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
        return cls.parse(obj["x"], obj["y"])

    def to_json(self) -> dict:
        return {"x": format_free(self.image_x), "y": format_free(self.image_y)}

    @cached_property
    def codes(self) -> tuple[FCode, FCode]:
        return (freduce(codes_of(self.image_x)), freduce(codes_of(self.image_y)))

    @property
    def palindromic(self) -> bool:
        return is_palindromic(self.image_x) and is_palindromic(self.image_y)

    @property
    def monotone(self) -> bool:
        signs = {l.sign for l in self.image_x.letters} | {l.sign for l in self.image_y.letters}
        return is_monotone(self.image_x) and is_monotone(self.image_y) and len(signs) <= 1

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def __repr__(self) -> str:
        return f"FreeAut(x->{format_free(self.image_x)}, y->{format_free(self.image_y)})"


PHI = FreeAut.parse("xyx", "x")
IDENTITY = FreeAut.parse("x", "y")


def apply(aut: FreeAut, w: Word) -> Word:
    """Reduced image of a word; letters keep their index, so x_i maps to phi(x)(x_i, y_i)."""
    if not w.letters:
        return Word()
    indices = {l.index for l in w.letters}
    if len(indices) == 1:
        (idx,) = indices
        return word_of(fapply(aut.codes, codes_of(w)), index=idx)
    # mixed indices: apply letterwise then reduce
    out: list[Letter] = []
    for l in w.letters:
        img = word_of(aut.codes[0] if l.kind == "x" else aut.codes[1], index=l.index) \
            if l.kind in ("x", "y") else None
        if img is None:
            raise AlphabetError(f"letter {l} is not in <x, y>")
        seq = img.letters if l.sign > 0 else img.inverse().letters
        for u in seq:
            if out and out[-1] == u.inv():
                out.pop()
            else:
                out.append(u)
    return Word(out)


def compose(f: FreeAut, g: FreeAut) -> FreeAut:
    """The automorphism f o g (apply g first)."""
    return FreeAut.from_codes(fapply(f.codes, g.codes[0]), fapply(f.codes, g.codes[1]))


def _moves(U: FCode, V: FCode):
    """Elementary Nielsen moves, applied to a pair; yields (label, U', V')."""
    Ui, Vi = finv(U), finv(V)
    yield "U*V", fmul(U, V), V
    yield "U*v", fmul(U, Vi), V
    yield "V*U", fmul(V, U), V
    yield "v*U", fmul(Vi, U), V
    yield "V*U'", U, fmul(V, U)
    yield "V*u'", U, fmul(V, Ui)
    yield "U*V'", U, fmul(U, V)
    yield "u*V'", U, fmul(Ui, V)


def _apply_move(label: str, P: FCode, Q: FCode) -> tuple[FCode, FCode]:
    Pi, Qi = finv(P), finv(Q)
    return {
        "U*V": (fmul(P, Q), Q), "U*v": (fmul(P, Qi), Q),
        "V*U": (fmul(Q, P), Q), "v*U": (fmul(Qi, P), Q),
        "V*U'": (P, fmul(Q, P)), "V*u'": (P, fmul(Q, Pi)),
        "U*V'": (P, fmul(P, Q)), "u*V'": (P, fmul(Pi, Q)),
    }[label]


def _finish(P: FCode, Q: FCode, U: FCode, V: FCode) -> FreeAut | None:
    # phi(P) = U, phi(Q) = V with {U, V} = {x^+-1, y^+-1}
    if len(U) != 1 or len(V) != 1 or abs(U[0]) == abs(V[0]):
        return None
    pre = {}
    for src, img in ((P, U[0]), (Q, V[0])):
        pre[abs(img)] = src if img > 0 else finv(src)
    return FreeAut.from_codes(pre[1], pre[2])


def inverse(aut: FreeAut, cap: int = 200_000) -> FreeAut:
    """Inverse automorphism by Nielsen reduction of the image pair.

    Greedy length reduction first, then a breadth-first search over
    length-nonincreasing moves, bounded by `cap` visited states.
    """
    P, Q = (1,), (2,)
    U, V = aut.codes
    if not U or not V:
        raise NotInvertible("image of a generator is trivial")
    while True:
        done = _finish(P, Q, U, V)
        if done is not None:
            return _verified_inverse(aut, done)
        best = None
        for label, U2, V2 in _moves(U, V):
            if len(U2) + len(V2) < len(U) + len(V) and U2 and V2:
                if best is None or len(U2) + len(V2) < best[0]:
                    best = (len(U2) + len(V2), label, U2, V2)
        if best is None:
            break
        _, label, U, V = best
        P, Q = _apply_move(label, P, Q)
    # fallback: BFS over moves that do not increase total length
    start = (P, Q, U, V)
    seen = {(U, V)}
    queue = deque([start])
    while queue and len(seen) < cap:
        P, Q, U, V = queue.popleft()
        done = _finish(P, Q, U, V)
        if done is not None:
            return _verified_inverse(aut, done)
        for label, U2, V2 in _moves(U, V):
            if not U2 or not V2 or len(U2) + len(V2) > len(U) + len(V):
                continue
            for UU, VV, swap in ((U2, V2, False), (V2, U2, True)):
                if (UU, VV) in seen:
                    continue
                seen.add((UU, VV))
                P2, Q2 = _apply_move(label, P, Q)
                if swap:
                    P2, Q2 = Q2, P2
                queue.append((P2, Q2, UU, VV))
    raise NotInvertible(f"no inverse found for {aut!r}")


def _verified_inverse(aut: FreeAut, inv: FreeAut) -> FreeAut:
    for f, g in ((aut, inv), (inv, aut)):
        c = compose(f, g)
        if c.codes != ((1,), (2,)):
            raise NotInvertible(f"candidate inverse {inv!r} fails verification")
    return inv


_INVERSE_CACHE: dict[tuple, FreeAut] = {}


def cached_inverse(aut: FreeAut) -> FreeAut:
    key = aut.codes
    if key not in _INVERSE_CACHE:
        _INVERSE_CACHE[key] = inverse(aut)
    return _INVERSE_CACHE[key]


def power(aut: FreeAut, n: int) -> FreeAut:
    if n < 0:
        return power(cached_inverse(aut), -n)
    result = IDENTITY
    for _ in range(n):
        result = compose(aut, result)
    return result


_POWER_CACHE: dict[tuple, FreeAut] = {}


def cached_power(aut: FreeAut, n: int) -> FreeAut:
    key = (aut.codes, n)
    if key not in _POWER_CACHE:
        _POWER_CACHE[key] = power(aut, n)
    return _POWER_CACHE[key]


def transition_matrix(aut: FreeAut) -> IntMatrix2:
    cx, cy = aut.codes
    return IntMatrix2(sum(1 for v in cx if abs(v) == 1), sum(1 for v in cy if abs(v) == 1),
                      sum(1 for v in cx if abs(v) == 2), sum(1 for v in cy if abs(v) == 2))


@dataclass(frozen=True)
class EigenData:
    matrix: IntMatrix2
    lam: QuadNum | float
    left_vector: tuple
    exact: bool = True
    tolerance: float = 0.0


def transition(aut: FreeAut) -> EigenData:
    if not aut.monotone:
        raise ValueError("transition data needs a monotone automorphism")
    M = transition_matrix(aut)
    e: EigenPair = pf_eigendata(M)
    return EigenData(M, e.lam, e.d, e.exact, e.tolerance)


def count_vector(c: FCode) -> tuple[int, int]:
    return (sum(1 for v in c if abs(v) == 1), sum(1 for v in c if abs(v) == 2))


def image_counts(M: IntMatrix2, counts: tuple[int, int], k: int) -> tuple[int, int]:
    """Letter counts of phi^k(w) for monotone w, without materializing the word."""
    return mat_pow(M, k).apply(counts)


def weighted_codes(c: FCode, d1, d2):
    nx, ny = count_vector(c)
    return d1 * nx + d2 * ny


def stretch_check(aut: FreeAut, w: Word):
    ed = transition(aut)
    d1, d2 = ed.left_vector
    c = freduce(codes_of(w))
    lhs = weighted_codes(fapply(aut.codes, c), d1, d2)
    rhs = ed.lam * weighted_codes(c, d1, d2)
    if ed.exact:
        return lhs, rhs, lhs <= rhs
    return lhs, rhs, float(lhs) <= float(rhs) + 1e-9 * max(1.0, float(rhs))
