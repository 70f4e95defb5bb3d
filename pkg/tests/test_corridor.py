import random

import pytest
from hypothesis import given, strategies as st

from snowlab.aut import PHI, cached_power, fapply, freduce
from snowlab.builders import canonical_diagram, doubled_canonical, snowflake
from snowlab.corridor import (InvalidVertices, balancing_check, bands_unlinked, corridor_counts, crossing_regions,
                              fold_corridor, lower_bound_certificate, measure_constants, orientation_check,
                              random_reduced, scheme_profile, segment_length_bound, sigma_schemes, trace)
from snowlab.diagram import DiagramBuilder, area, empty_diagram, word_codes
from snowlab.groups import standard_word
from snowlab.treegeom import CorridorScheme, r_scheme, scheme_for_segment, segment
from snowlab.words import D1, D2, Word, format_word, parse_word, reletter
from strategies import FIG, TREES, palindromes

codes = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=30).map(lambda c: freduce(tuple(c)))


@pytest.mark.parametrize("T", TREES, ids=lambda T: f"T{T.n_vertices}")
@pytest.mark.parametrize("w", ["x", "xyx", "XyX", "xyxxxyx"])
def test_sigma_corridors_on_canonical(T, w):
    d = canonical_diagram(w, T)
    for s in sigma_schemes(T):
        cs = trace(d, s)
        assert all(c.kind == "band" for c in cs) and len(cs) == len(Word.parse(w))
        assert orientation_check(d, s, cs) and bands_unlinked(d, cs)
        # cell-disjoint and covering every corridor cell
        cells = [f for c in cs for f in c.cells]
        assert len(cells) == len(set(cells)) == int((scheme_profile(d, s) == 2).sum())


@pytest.mark.parametrize("T", TREES[:2], ids=lambda T: f"T{T.n_vertices}")
def test_doubled_never_straight_across(T):
    w = "xyx"
    d = doubled_canonical(w, T)
    nu0 = T.peripherals[0]
    for (p, q), (bands, annuli) in corridor_counts(d, T).items():
        assert annuli == 0
        assert bands == (3 if nu0 in (p, q) else 6)
    # every band joins letters of the two sides of one copy, never the mirror copy of the same side
    bw = d.boundary_walk()
    half = len(bw) // 2
    for sg in [segment(T, p, q) for p, q in corridor_counts(d, T) if nu0 not in (p, q)]:
        for c in trace(d, scheme_for_segment(T, sg)):
            a, b = (bw.index(x) for x in c.ends)
            assert (a < half) == (b < half)


def test_empty_and_schemeless():
    d = empty_diagram()
    assert trace(d, r_scheme(1)) == [] and lower_bound_certificate(d, TREES[0]) == 0
    assert trace(canonical_diagram("x"), r_scheme(1)) == []
    assert tuple(crossing_regions(canonical_diagram("x"), 0, TREES[0])) in {(0, 1), (1, 0)}


def test_single_cell_corridor_is_oriented():
    T = TREES[0]
    b = DiagramBuilder()
    vs = b.new_vertices(3)
    b.add_face(list(vs), word_codes(parse_word("X1 x2 A1")), "triangle")
    d = b.build(int(vs[0]))
    s = scheme_for_segment(T, segment(T, 1, 2))
    cs = trace(d, s)
    assert len(cs) == 1 and len(cs[0]) == 1 and orientation_check(d, s, cs)


def test_negative_control_misoriented_scheme():
    T = TREES[0]
    d = canonical_diagram("xyx", T)
    s = sigma_schemes(T)[0]
    bad = dict(s.orient)
    k = next(l for l in bad if l[0] == "x")
    bad[k] = -bad[k]
    assert not orientation_check(d, CorridorScheme(bad, "sigma", s.tag))


@pytest.mark.parametrize("T", TREES, ids=lambda T: f"T{T.n_vertices}")
def test_crossing_regions_by_edge_type(T):
    w = "xyxxxyx"
    l = 7
    d = canonical_diagram(w, T)
    for e in T.side_keys():
        cr = crossing_regions(d, e, T)
        assert cr.unpaired == 0
        if e in T.partner:
            assert (cr.squares, cr.triangles) == (l * l, 0)
        else:
            assert cr.triangles == l and cr.squares >= l * (l - 1) // 2 and cr.area == l * l


@given(palindromes(max_half=3, positive=False))
def test_certificate_equals_area(w):
    if not w.is_reduced:
        return
    for T in TREES[:2]:
        for d in (canonical_diagram(w, T), doubled_canonical(w, T)):
            assert lower_bound_certificate(d, T) == area(d)


def test_certificate_on_fig_tree():
    d = canonical_diagram("xyx", FIG)
    assert lower_bound_certificate(d, FIG) == area(d) == 3 * 6 * 9


@pytest.mark.parametrize("T", TREES[:2], ids=lambda T: f"T{T.n_vertices}")
@pytest.mark.parametrize("n,depth", [(1, 1), (1, 2), (2, 2)])
def test_r_corridors_in_snowflakes_are_bands(T, n, depth):
    D, rep = snowflake("x", depth, T, n)
    total = 0
    for i in range(1, T.m + 1):
        s = r_scheme(i)
        cs = trace(D, s)
        assert cs and all(c.kind == "band" for c in cs)
        assert orientation_check(D, s, cs) and bands_unlinked(D, cs)
        total += len(cs)
    assert 2 * total == rep.r_count


# ----------------------------------------------------------------- folded corridors

def test_fold_examples():
    fc = fold_corridor("a")
    assert format_word(fc.top_word()) == "a1b1a1" and fc.folds == 0 and len(fc.cells) == 1
    fc = fold_corridor("aB")
    assert format_word(fc.top_word()) == "a1b1" and fc.folds == 1
    fc = fold_corridor("")
    assert fc.top == () and fc.cells == [] and fc.seam_violations() == []


@given(codes, st.integers(1, 2))
def test_fold_top_is_reduced_image(c, n):
    fc = fold_corridor(c, 1, n)
    assert fc.top == fapply(cached_power(PHI, n).codes, c)
    assert fc.seam_violations() == []


@given(codes)
def test_nearly_above_is_total_and_witness_bounded(c):
    fc = fold_corridor(c)
    k1 = fc.k1_bound()
    for p in fc.top_vertices:
        na = fc.nearly_above(p)
        assert na
        assert all(len(path) - 1 <= k1 for path in na.values())
        below = fc.below(p)
        if below:
            assert max(below) - min(below) <= fc.k0()


def test_one_cell_nearly_above():
    fc = fold_corridor("a")
    assert 0 in fc.nearly_above(fc.top_vertices[0])
    assert 1 in fc.nearly_above(fc.top_vertices[-1])


@given(codes.filter(bool))
def test_whole_segment_has_zero_defect(c):
    fc = fold_corridor(c)
    obs, pred, defect = segment_length_bound(fc, 0, len(fc.top_vertices) - 1, 0, len(c))
    assert defect == 0 and obs == pred


def test_one_cell_interior_defect_bounded_by_perimeter():
    fc = fold_corridor("a")
    L = fc.L
    for p1 in range(4):
        for p2 in range(p1, 4):
            for q1 in fc.nearly_above(fc.top_vertices[p1]):
                for q2 in fc.nearly_above(fc.top_vertices[p2]):
                    if q1 <= q2:
                        assert abs(float(segment_length_bound(fc, p1, p2, q1, q2)[2])) <= L * float(D1)


def test_invalid_vertices():
    fc = fold_corridor("aBabaa")
    with pytest.raises(InvalidVertices):
        segment_length_bound(fc, 0, 99, 0, 1)
    far = len(fc.top_vertices) - 1
    with pytest.raises(InvalidVertices):
        segment_length_bound(fc, far, far, 0, 0)


def test_constants_small_sweep():
    rep = measure_constants(samples=60, max_length=30, seed=3)
    assert rep.seam_violations == 0 and rep.top_mismatches == 0
    assert rep.history == sorted(rep.history)
    assert rep.K1_observed <= rep.K1_bound


# ----------------------------------------------------------------- balancing

@given(codes)
def test_balancing_on_standard_words(c):
    from snowlab.aut import word_of
    pal = c + c[-2::-1] if c else ()
    for T in TREES[:2]:
        z = word_of(pal, "a", "b", T.peripherals[0])
        tail = Word()
        for nu in T.peripherals[1:]:
            tail = tail * reletter(z, ("a", nu), ("b", nu))
        chk = balancing_check(tail, T)
        assert chk is not None and chk.ok
        assert len(tail) >= T.m * chk.z_length


def test_balancing_rejects_non_members():
    assert balancing_check(parse_word("x0"), TREES[0]) is None
    chk = balancing_check(Word(), TREES[0])
    assert chk.ok and chk.z_length == 0


def test_balancing_corridor_double_check():
    # in the canonical diagram the nu0 letters are joined to each nu_i side by |z| bands
    T = TREES[1]
    for w in ("xyx", "XyX"):
        d = canonical_diagram(w, T)
        nu0 = T.peripherals[0]
        for (p, q), (bands, _) in corridor_counts(d, T).items():
            if nu0 in (p, q):
                assert bands == len(Word.parse(w))
