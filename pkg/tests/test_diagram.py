import json

import numpy as np
import pytest
from hypothesis import given

from snowlab.builders import canonical_diagram, doubled_canonical
from snowlab.diagram import (Diagram, DiagramBuilder, LabelMismatch, NotADisk, area, boundary_word, decode,
                             empty_diagram, encode, face_type_counts, glue, is_reduced, perimeter, validate,
                             word_codes)
from snowlab.groups import presentation_V, presentation_VT, standard_word
from snowlab.words import Letter, Word, format_word, parse_word, reduce
from strategies import TREES, palindromes, words

V = presentation_V()


def is_rotation(a: list, b: list) -> bool:
    return len(a) == len(b) and any(a[k:] + a[:k] == b for k in range(max(len(a), 1)))


def one_face(rel: Word, ftype: str) -> Diagram:
    b = DiagramBuilder()
    vs = b.new_vertices(len(rel))
    b.add_face(list(vs), word_codes(rel), ftype)
    return b.build(int(vs[0]))


@given(words("xyabrstuc", (0, 1, 7)))
def test_code_roundtrip(w):
    for l in w:
        assert decode(encode(l)) == l
        assert encode(l.inv()) == encode(l) ^ 1


def test_single_relator_diagrams_are_valid():
    for r in V.relators:
        d = one_face(r.word, r.ftype)
        rep = validate(d, V)
        assert rep.ok, rep.violations
        assert area(d) == r.area and perimeter(d) == len(r.word)
        assert d.euler_characteristic() == 1
        assert is_rotation(list(boundary_word(d)), list(r.word))


def test_empty_diagram():
    d = empty_diagram()
    assert area(d) == 0 and perimeter(d) == 0 and boundary_word(d) == Word()


def test_glue_two_faces_along_an_edge():
    r = V.relators[0]  # X0 x1 A0
    d1 = one_face(r.word, r.ftype)
    d2 = one_face(r.word.inverse(), r.ftype)
    # the last letter of d1 (A0) against the first letter of d2 read backwards (a0)
    n = len(r.word)
    g = glue(d1, (n - 1, 1), d2, (0, 1), V)
    assert g.n_faces == 2 and validate(g, V).ok
    assert perimeter(g) == 2 * (n - 1)
    with pytest.raises(LabelMismatch):
        glue(d1, (0, 1), d2, (0, 1), V)


def test_same_direction_darts_are_not_a_disk():
    b = DiagramBuilder()
    vs = b.new_vertices(4)
    w = parse_word("x0 y1 X0 Y1")
    b.add_face(list(vs[:4]), word_codes(w), "quad")
    # a second face reusing the directed edge vs0 -> vs1
    u = b.new_vertices(2)
    b.add_face([int(vs[0]), int(vs[1]), int(u[0]), int(u[1])], word_codes(w), "quad")
    d = b.build(int(vs[0]))
    with pytest.raises(NotADisk):
        d.twin


def test_mislabeled_twin_is_reported():
    b = DiagramBuilder()
    vs = b.new_vertices(3)
    b.add_face(list(vs), word_codes(parse_word("X0 x1 A0")), "triangle")
    w = b.new_vertices(1)
    # shares edge vs1 -> vs0 reversed but with the wrong label
    b.add_face([int(vs[1]), int(vs[0]), int(w[0])], word_codes(parse_word("y1 x0 y0")), "triangle")
    rep = validate(b.build(int(vs[0])), V)
    assert not rep.ok
    assert any("twin" in v for v in rep.violations)


@given(palindromes(max_half=3, positive=False))
def test_canonical_boundary_is_standard_word(w):
    if not w.is_reduced:
        return
    for T in TREES[:2]:
        d = canonical_diagram(w, T)
        assert validate(d, presentation_VT(T)).ok
        P = presentation_VT(T)
        got, want = boundary_word(d), standard_word(w, T)
        canon = lambda u: [P.canonical(l.kind, l.index) for l in u]
        assert is_rotation(canon(got), canon(want))
        tw = d.twin
        inner = tw >= 0
        assert np.array_equal(tw[tw[inner]], np.nonzero(inner)[0])


def test_json_roundtrip():
    d = doubled_canonical("xyx", TREES[1])
    again = Diagram.from_json(json.loads(json.dumps(d.to_json())))
    assert area(again) == area(d) and format_word(boundary_word(again)) == format_word(boundary_word(d))
    assert face_type_counts(again) == face_type_counts(d)


def test_reduced_and_not_reduced():
    r = V.relators[4]
    d1, d2 = one_face(r.word, r.ftype), one_face(r.word.inverse(), r.ftype)
    n = len(r.word)
    # fold a face onto its mirror image along one edge: not reduced
    g = glue(d1, (0, 1), d2, (n - 1, 1), V)
    assert not is_reduced(g, V)
    assert is_reduced(canonical_diagram("xyx"), presentation_VT(TREES[0]))


def test_sliced_twin_matching_agrees():
    from snowlab.builders import snowflake
    from snowlab.diagram import _match_twins
    D, _ = snowflake("xyx", 1)
    full = _match_twins(D.tail, D.head, D.n_vertices, chunk=1 << 30)
    for chunk in (1, 7, 64):
        assert (_match_twins(D.tail, D.head, D.n_vertices, chunk=chunk) == full).all()
    assert ((full < 0) | (full[np.maximum(full, 0)] == np.arange(len(full)))).all()
