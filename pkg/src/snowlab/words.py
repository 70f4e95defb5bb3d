"""Letters, words, free reduction, the involution tau and length functions."""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

from .exactnum import QuadNum, SQRT2

KINDS = ("x", "y", "a", "b", "c", "t", "r", "s", "u")
STABLE_KINDS = frozenset("rsu")

D1 = 1 + SQRT2  # weight of x and a letters for the fixed automorphism
D2 = QuadNum(1)


class AlphabetError(ValueError):
    """A letter outside the alphabet an operation is defined on."""


class Letter(NamedTuple):
    kind: str
    index: int
    sign: int

    def inv(self) -> Letter:
        return Letter(self.kind, self.index, -self.sign)

    def __str__(self) -> str:
        k = self.kind if self.sign > 0 else self.kind.upper()
        return f"{k}{self.index}"


class Word:
    """An immutable sequence of letters."""

    __slots__ = ("letters", "_hash")

    def __init__(self, letters: Iterable[Letter] = ()):
        self.letters = tuple(letters)
        self._hash = None

    @classmethod
    def parse(cls, text: str) -> Word:
        return parse_word(text)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Word(self.letters[i])
        return self.letters[i]

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def __pow__(self, k: int) -> Word:
        if k < 0:
            return self.inverse() ** (-k)
        return Word(self.letters * k)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.letters)
        return self._hash

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"

    def __str__(self) -> str:
        return format_word(self)

    def inverse(self) -> Word:
        return Word(l.inv() for l in reversed(self.letters))

    @property
    def is_reduced(self) -> bool:
        ls = self.letters
        return all(ls[i + 1] != ls[i].inv() for i in range(len(ls) - 1))

    def kinds(self) -> set[str]:
        return {l.kind for l in self.letters}


EMPTY = Word()

_TOKEN = re.compile(r"([xyabctrsuXYABCTRSU])(\d*)")


def parse_word(text: str) -> Word:
    """Parse `x0 Y1 a2` style text; capital letters are inverses, a bare letter has index 0."""
    s = text.replace(" ", "").replace("*", "").replace(".", "")
    if s in ("", "1", "e", "ε"):
        return EMPTY
    letters = []
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            raise AlphabetError(f"cannot parse word at {s[pos:]!r}")
        ch, digits = m.groups()
        letters.append(Letter(ch.lower(), int(digits) if digits else 0, 1 if ch.islower() else -1))
        pos = m.end()
    return Word(letters)


def format_word(w: Word) -> str:
    return "".join(str(l) for l in w.letters)


def letter(kind: str, index: int = 0, sign: int = 1) -> Letter:
    if kind not in KINDS:
        raise AlphabetError(f"unknown letter kind {kind!r}")
    return Letter(kind, index, sign)


def reduce(w: Word) -> Word:
    out: list[Letter] = []
    for l in w.letters:
        if out and out[-1].kind == l.kind and out[-1].index == l.index and out[-1].sign == -l.sign:
            out.pop()
        else:
            out.append(l)
    return Word(out)


def cyclic_reduce(w: Word) -> Word:
    ls = list(reduce(w).letters)
    i, j = 0, len(ls) - 1
    while i < j and ls[i] == ls[j].inv():
        i += 1
        j -= 1
    return Word(ls[i:j + 1])


def _check_free(w: Word, allowed: str) -> None:
    for l in w.letters:
        if l.kind not in allowed:
            raise AlphabetError(f"letter {l} outside alphabet {{{','.join(allowed)}}}")


def tau(w: Word) -> Word:
    """Letterwise involution inverting x and y letters (and a, b); t and c are fixed."""
    _check_free(w, "xyabtc")
    return Word(Letter(l.kind, l.index, -l.sign) if l.kind in "xyab" else l for l in w.letters)


def is_palindromic(w: Word) -> bool:
    _check_free(w, "xyab")
    return tau(w) == w.inverse()


def is_monotone(w: Word) -> bool:
    signs = {l.sign for l in w.letters}
    return len(signs) <= 1


def substitute(w: Word, table: dict) -> Word:
    """Replace each letter kind/index by a word; `table` maps (kind, index) to Word."""
    out: list[Letter] = []
    for l in w.letters:
        img = table.get((l.kind, l.index))
        if img is None:
            out.append(l)
        elif l.sign > 0:
            out.extend(img.letters)
        else:
            out.extend(img.inverse().letters)
    return Word(out)


def reletter(w: Word, x_to: tuple[str, int], y_to: tuple[str, int]) -> Word:
    """Read a word in x, y as a word in two other generators, e.g. w(a_i, b_i)."""
    out = []
    for l in w.letters:
        if l.kind in ("x", "a"):
            out.append(Letter(x_to[0], x_to[1], l.sign))
        elif l.kind in ("y", "b"):
            out.append(Letter(y_to[0], y_to[1], l.sign))
        else:
            raise AlphabetError(f"letter {l} is not an x/y letter")
    return Word(out)


def to_xy(w: Word) -> Word:
    """Forget kinds a/b and indices: the underlying word in x and y."""
    return reletter(w, ("x", 0), ("y", 0))


@dataclass
class LengthReport:
    total: int = 0
    x_count: int = 0
    y_count: int = 0
    per_peripheral: dict[int, int] = field(default_factory=dict)
    stable_count: int = 0
    other_count: int = 0
    weighted_total: QuadNum = field(default_factory=QuadNum)
    weighted_x: QuadNum = field(default_factory=QuadNum)
    weighted_y: QuadNum = field(default_factory=QuadNum)
    weighted_per_peripheral: dict[int, QuadNum] = field(default_factory=dict)

    def peripheral(self, i: int) -> int:
        return self.per_peripheral.get(i, 0)

    def weighted_peripheral(self, i: int) -> QuadNum:
        return self.weighted_per_peripheral.get(i, QuadNum(0))


def letter_weight(l: Letter, d1: QuadNum = D1, d2: QuadNum = D2) -> QuadNum:
    if l.kind in ("x", "a"):
        return d1
    if l.kind in ("y", "b"):
        return d2
    return QuadNum(1)


def measure(w: Word, d1: QuadNum = D1, d2: QuadNum = D2) -> LengthReport:
    counts = Counter((l.kind, l.index) for l in w.letters)
    rep = LengthReport(total=len(w))
    npa: Counter = Counter()
    npb: Counter = Counter()
    for (k, i), c in counts.items():
        if k == "x":
            rep.x_count += c
        elif k == "y":
            rep.y_count += c
        elif k == "a":
            npa[i] += c
        elif k == "b":
            npb[i] += c
        elif k in STABLE_KINDS:
            rep.stable_count += c
        else:
            rep.other_count += c
    for i in sorted(set(npa) | set(npb)):
        rep.per_peripheral[i] = npa[i] + npb[i]
        rep.weighted_per_peripheral[i] = d1 * npa[i] + d2 * npb[i]
    rep.weighted_x = d1 * rep.x_count
    rep.weighted_y = d2 * rep.y_count
    rep.weighted_total = (rep.weighted_x + rep.weighted_y
                          + sum(rep.weighted_per_peripheral.values(), QuadNum(0))
                          + rep.stable_count + rep.other_count)
    return rep


def weighted_length(w: Word, d1: QuadNum = D1, d2: QuadNum = D2) -> QuadNum:
    nx = sum(1 for l in w.letters if l.kind in ("x", "a"))
    ny = sum(1 for l in w.letters if l.kind in ("y", "b"))
    return d1 * nx + d2 * ny + (len(w) - nx - ny)
