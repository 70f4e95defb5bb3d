import pytest
from hypothesis import given

from snowlab.aut import FreeAut, transition
from snowlab.builders import (MAX_FACES, NotMonotone, NotPalindromic, TooLarge, canonical_diagram,
                              doubled_canonical, snowflake, snowflake_boundary_pieces, snowflake_sizes,
                              triangle_diagram)
from snowlab.diagram import area, boundary_kind_count, boundary_word, is_reduced, perimeter, validate
from snowlab.groups import presentation_S, presentation_V, presentation_VT
from snowlab.words import Word, format_word, parse_word
from strategies import TREES, palindromes


@pytest.mark.parametrize("w,a", [("x", 1), ("xyx", 9), ("xyxxxyx", 49), ("XyX", 9)])
def test_triangle_area(w, a):
    d = triangle_diagram(w)
    assert area(d) == a and validate(d, presentation_V()).ok


def test_triangle_boundary_layout():
    d = triangle_diagram("xyx", 1)
    assert format_word(boundary_word(d)) == "a1b1a1" + "X2Y2X2" + "x1y1x1"
    assert area(triangle_diagram("")) == 0


def test_non_palindromes_rejected():
    with pytest.raises(NotPalindromic):
        canonical_diagram("xy")
    with pytest.raises(NotMonotone):
        snowflake("XyX", 1)


@given(palindromes(max_half=3))
def test_canonical_and_doubled_areas(w):
    for T in TREES:
        c, dd = canonical_diagram(w, T), doubled_canonical(w, T)
        assert area(c) == 3 * T.n_vertices * len(w) ** 2
        assert area(dd) == 6 * T.n_vertices * len(w) ** 2
        assert perimeter(c) == (T.m + 1) * len(w)
        assert perimeter(dd) == 2 * T.m * len(w)


def test_canonical_examples():
    assert format_word(boundary_word(canonical_diagram("x"))) == "a0a1a2"
    assert format_word(boundary_word(doubled_canonical("x"))) == "a1a2A1A2"
    d = canonical_diagram("x", TREES[1])
    assert area(d) == 6 and perimeter(d) == 4
    for T in TREES[:2]:
        assert validate(doubled_canonical("xyx", T), presentation_VT(T)).ok
        assert is_reduced(doubled_canonical("xyx", T), presentation_VT(T))


def test_snowflake_depth_one_by_hand():
    d, rep = snowflake("x", 1)
    assert rep.area == 70 == 54 + 4 + 12
    assert format_word(boundary_word(d)) == "r1A1A2R1r2A1A2R2r1a1a2R1r2a1a2R2"
    assert validate(d, presentation_S(TREES[0])).ok and is_reduced(d, presentation_S(TREES[0]))
    d0, rep0 = snowflake("x", 0)
    assert (rep0.area, rep0.perimeter, rep0.r_count) == (6, 4, 0)


@pytest.mark.parametrize("T", TREES[:2], ids=lambda T: f"T{T.n_vertices}")
@pytest.mark.parametrize("n,d", [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2)])
def test_closed_form_matches_materialized(T, n, d):
    D, meas = snowflake("x", d, T, n)
    pred = snowflake_sizes("x", d, T, n)
    for k in ("perimeter", "area", "r_count", "faces", "weighted_perimeter"):
        assert getattr(meas, k) == getattr(pred, k), k
    if D.n_faces < 20000:
        assert validate(D, presentation_S(T, n)).ok


def test_boundary_pieces_match_diagram():
    T = TREES[0]
    D, _ = snowflake("x", 2, T)
    pieces = snowflake_boundary_pieces("x", 2, T)
    assert sum(1 for p in pieces if p[0] == "r") == boundary_kind_count(D, "r")


def test_too_large_carries_report():
    with pytest.raises(TooLarge) as ei:
        snowflake("x", 4, TREES[1], 2)
    assert ei.value.report.faces > MAX_FACES
    assert ei.value.report.area == snowflake_sizes("x", 4, TREES[1], 2).area


def test_sizes_only_mode_and_lower_bound():
    D, rep = snowflake("x", 12, materialize=False)
    assert D is None and not rep.materialized
    for d in range(1, 13):
        r = snowflake_sizes("x", d, TREES[1], 1)
        assert r.lower_bound_ok
        assert r.r_count == sum(4 * 3 ** j for j in range(1, d + 1))  # m = 3


def test_area_ratio_tends_to_lambda_squared():
    lam2 = float(transition(FreeAut.parse("xyx", "x")).lam) ** 2
    a = [snowflake_sizes("x", d).area for d in (10, 11)]
    assert abs(a[1] / a[0] - lam2) < 0.05 * lam2


@given(palindromes(max_half=2))
def test_sizes_for_other_words(w):
    D, meas = snowflake(w, 1)
    pred = snowflake_sizes(w, 1)
    assert (meas.area, meas.perimeter, meas.r_count) == (pred.area, pred.perimeter, pred.r_count)
