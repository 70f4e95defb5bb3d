"""Shared hypothesis strategies."""
from __future__ import annotations

from hypothesis import strategies as st

from snowlab.treegeom import FIG_TREE, build_snowtree
from snowlab.words import Letter, Word

TREES = [build_snowtree(), build_snowtree([[0, 1]]), build_snowtree([[0, 1], [1, 2]])]
FIG = build_snowtree(FIG_TREE)


def letters_of(kinds: str, indices) -> st.SearchStrategy:
    return st.builds(Letter, st.sampled_from(list(kinds)), st.sampled_from(list(indices)), st.sampled_from([1, -1]))


def words(kinds: str = "xy", indices=(0,), max_size: int = 12) -> st.SearchStrategy:
    return st.lists(letters_of(kinds, indices), max_size=max_size).map(Word)


free_codes = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=16).map(tuple)


@st.composite
def palindromes(draw, min_half: int = 1, max_half: int = 3, positive: bool = True):
    h = draw(st.lists(st.sampled_from("xy" if positive else "xyXY"), min_size=min_half, max_size=max_half))
    s = h + h[-2::-1]
    return Word.parse("".join(s))


def vertex_letters(T) -> list[Letter]:
    out = []
    for v in range(T.n_vertices):
        for i in (3 * v, 3 * v + 1, 3 * v + 2):
            out += [Letter("x", i, 1), Letter("y", i, 1)]
    for nu in T.peripherals:
        out += [Letter("a", nu, 1), Letter("b", nu, 1)]
    return out


@st.composite
def vt_words(draw, T, max_size: int = 10):
    al = vertex_letters(T)
    ls = draw(st.lists(st.tuples(st.sampled_from(al), st.sampled_from([1, -1])), max_size=max_size))
    return Word(l if s > 0 else l.inv() for l, s in ls)
