"""The ten acceptance criteria, each at its pinned tolerance and runtime limit.

Every test records one PASS/FAIL line (see acceptance_log); the lines are printed together at the
end of the pytest run. Run `python -m pytest tests/test_acceptance.py -v` to see only these.
"""
from __future__ import annotations

import gc
import itertools
import random

from snowlab.aut import PHI, transition
from snowlab.builders import canonical_diagram, doubled_canonical, snowflake, snowflake_sizes
from snowlab.corridor import corridor_counts, fold_corridor, lower_bound_certificate, random_reduced, trace
from snowlab.diagram import area
from snowlab.exactnum import IntMatrix2, QuadNum
from snowlab.groups import presentation_G, presentation_S
from snowlab.lab import FuzzConfig, balancing_fuzz, dehn_fit, distortion_report, embedding_fuzz
from snowlab.normalform import (britton_normalize, g_normalize, membership_profile, vt_normalize,
                                wt_normalize)
from snowlab.treegeom import scheme_for_segment, segment
from snowlab.words import Letter, Word
from acceptance_log import criterion
from oracles import coordinates, free_reduce, membership_table, reduced_words, signed
from strategies import TREES

T1, T2, T3 = TREES


def monotone_palindromes(max_len: int) -> list[str]:
    out = []
    for k in range(1, max_len + 1):
        for s in itertools.product("xy", repeat=k):
            if s == s[::-1]:
                w = "".join(s)
                out += [w, w.upper()]
    return out


# ----------------------------------------------------------------- 1

def test_c01_eigen_data():
    with criterion(1, "eigen-data exact", 1) as box:
        ed = transition(PHI)
        d1, d2 = ed.left_vector
        M = ed.matrix
        dM = (d1 * M.m00 + d2 * M.m10, d1 * M.m01 + d2 * M.m11)
        defect = [dM[0] - ed.lam * d1, dM[1] - ed.lam * d2]
        box["ok"] = (M == IntMatrix2(2, 1, 1, 0) and ed.lam == QuadNum(1, 1) and ed.exact
                     and all(x == 0 for x in defect))
        box["detail"] = f"M={M}, lambda={ed.lam}, d=({d1}, {d2}), defect={defect}"
    assert box["passed"]


# ----------------------------------------------------------------- 2

def test_c02_canonical_area():
    with criterion(2, "canonical and doubled areas", 10) as box:
        bad, n = [], 0
        for T in TREES:
            t = T.n_vertices
            for w in monotone_palindromes(6):
                l = len(w)
                n += 1
                a1, a2 = area(canonical_diagram(w, T)), area(doubled_canonical(w, T))
                if a1 != 3 * t * l * l or a2 != 6 * t * l * l:
                    bad.append((t, w, a1, a2))
        box["ok"] = not bad
        box["detail"] = f"{n} (tree, word) instances, {len(bad)} mismatches {bad[:3]}"
    assert box["passed"]


# ----------------------------------------------------------------- 3

def test_c03_certificate_and_bands():
    with criterion(3, "least-area certificate and band counts", 30) as box:
        bad, n = [], 0
        for T in TREES:
            nu0 = T.peripherals[0]
            for w in monotone_palindromes(6):
                l = len(w)
                can, dbl = canonical_diagram(w, T), doubled_canonical(w, T)
                for kind, d in (("canonical", can), ("doubled", dbl)):
                    n += 1
                    if lower_bound_certificate(d, T) != area(d):
                        bad.append((T.n_vertices, w, kind, "certificate"))
                    counts = corridor_counts(d, T)
                    for (p, q), (bands, annuli) in counts.items():
                        # the doubled diagram holds two copies; a segment avoiding nu0 meets both
                        want = l if kind == "canonical" or nu0 in (p, q) else 2 * l
                        if annuli or bands != want:
                            bad.append((T.n_vertices, w, kind, (p, q), bands, annuli))
                    if kind == "doubled":
                        bw = dbl.boundary_walk()
                        pos = {x: k for k, x in enumerate(bw)}
                        half = len(bw) // 2
                        for p, q in counts:
                            if nu0 in (p, q):
                                continue
                            cs = trace(dbl, scheme_for_segment(T, segment(T, p, q)))
                            first = sum(1 for c in cs if pos[c.ends[0]] < half and pos[c.ends[1]] < half)
                            second = sum(1 for c in cs if pos[c.ends[0]] >= half and pos[c.ends[1]] >= half)
                            if (first, second) != (l, l):
                                bad.append((T.n_vertices, w, "per copy", (p, q), first, second))
        box["ok"] = not bad
        box["detail"] = f"{n} diagrams, {len(bad)} failures {bad[:3]}"
    assert box["passed"]


# ----------------------------------------------------------------- 4

def test_c04_snowflake_oracle():
    with criterion(4, "snowflake closed forms vs materialized diagrams", 60) as box:
        bad, n = [], 0
        for T in TREES[:2]:
            for nn in (1, 2):
                for d in range(5):
                    pred = snowflake_sizes("x", d, T, nn)
                    D, meas = snowflake("x", d, T, nn, max_faces=pred.faces)
                    n += 1
                    got = (meas.perimeter, meas.weighted_perimeter, meas.area, meas.r_count, meas.faces)
                    want = (pred.perimeter, pred.weighted_perimeter, pred.area, pred.r_count, pred.faces)
                    if got != want or D.euler_characteristic() != 1:
                        bad.append((T.n_vertices, nn, d, got, want))
                    del D, meas
                    gc.collect()
        _, small = snowflake("x", 1, T1, 1)
        box["ok"] = not bad and small.area == 70
        box["detail"] = f"{n} (tree, n, depth) cases exact, {len(bad)} mismatches; area of depth-1 flake {small.area}"
    assert box["passed"]


# ----------------------------------------------------------------- 5

def test_c05_dehn_slopes():
    with criterion(5, "Dehn exponent slope at depth 12", 60) as box:
        parts, ok = [], True
        for T, nn, target in ((T1, 1, 2.5431), (T2, 2, 3.2090)):
            rep = dehn_fit(T, nn, d_max=12)
            good = abs(rep.target - target) < 1e-3 and rep.residual < 0.05
            ok &= good
            parts.append(f"(m={T.m}, n={nn}) slope {rep.estimate:.5f} vs 2alpha {rep.target:.5f}, "
                         f"residual {rep.residual:.2e}")
        box["ok"] = ok
        box["detail"] = "; ".join(parts)
    assert box["passed"]


# ----------------------------------------------------------------- 6

def _naive_top(w: tuple, n: int) -> list[tuple[str, int]]:
    """phi^n by textual substitution and stack reduction, read in a, b."""
    img = {("a", 1): [("a", 1), ("b", 1), ("a", 1)], ("b", 1): [("a", 1)]}
    seq = [("a" if abs(v) == 1 else "b", 1 if v > 0 else -1) for v in w]
    for _ in range(n):
        out = []
        for k, s in seq:
            part = img[(k, 1)]
            out += part if s > 0 else [(kk, -ss) for kk, ss in reversed(part)]
        seq = list(free_reduce(out))
    return seq


def test_c06_folded_corridors():
    with criterion(6, "folded corridors", 60) as box:
        rng = random.Random(2024)
        n = 1
        bad_top = bad_seam = 0
        history, k0 = [], 0
        for _ in range(200):
            w = random_reduced(rng, rng.randint(1, 50))
            fc = fold_corridor(w, 1, n)
            top = [(l.kind, l.sign) for l in fc.top_word()]
            bad_top += top != _naive_top(w, n) or any(l.index != 1 for l in fc.top_word())
            bad_seam += len(fc.seam_violations()) > 0
            k0 = max(k0, fc.k0())
            history.append(k0)
        stable = history[-100] == history[-1]
        box["ok"] = bad_top == 0 and bad_seam == 0 and stable
        box["detail"] = (f"200 bottoms, top mismatches {bad_top}, seam failures {bad_seam}, "
                         f"K0 {history[-100]} -> {history[-1]} over the last 100")
    assert box["passed"]


# ----------------------------------------------------------------- 7

def test_c07_balancing():
    with criterion(7, "balancing inequality, plain and weighted", 120) as box:
        parts, ok = [], True
        for T, seed in ((T1, 7), (T2, 8)):
            rep = balancing_fuzz(T, cfg=FuzzConfig(samples=1000, seed=seed))
            ok &= rep.ok and rep.samples == 1000
            parts.append(f"|T|={T.n_vertices}: {rep.samples} pairs, {len(rep.violations)} violations, "
                         f"{rep.nf_mismatches} membership mismatches, {rep.tight} tight")
        box["ok"] = ok
        box["detail"] = "; ".join(parts)
    assert box["passed"]


# ----------------------------------------------------------------- 8

def test_c08_distortion_band():
    with criterion(8, "distortion band", 60) as box:
        parts, ok = [], True
        for T in (T1, T2):
            rep = distortion_report(T, 1, d_max=10, certify_upto=3, fuzz=50, seed=1)
            good = rep.band <= 10 and all(rep.certified.get(d) for d in range(4)) and rep.recurrence_ok
            ok &= good
            parts.append(f"|T|={T.n_vertices}: band {rep.band:.3f}, ratios "
                         f"{min(rep.ratios[1:]):.3f}..{max(rep.ratios[1:]):.3f}, "
                         f"certified d<=3 {all(rep.certified.values())}")
        box["ok"] = ok
        box["detail"] = "; ".join(parts)
    assert box["passed"]


# ----------------------------------------------------------------- 9

def test_c09_embedding():
    with criterion(9, "embedding into the free-by-cyclic tree group", 120) as box:
        rep = embedding_fuzz(T1, 1, samples=500, seed=5, trivial_samples=100, untwist_samples=100)
        box["ok"] = rep.ok and rep.nontrivial_tested == 500 and rep.untwist_tested == 100
        box["detail"] = (f"relator failures {rep.relator_failures}, nontrivial {rep.nontrivial_tested} "
                         f"(failures {rep.nontrivial_failures}), trivial {rep.trivial_tested} "
                         f"(failures {rep.trivial_failures}), untwist {rep.untwist_tested} "
                         f"(failures {rep.untwist_failures})")
    assert box["passed"]


# ----------------------------------------------------------------- 10

def _random_words(rng, alphabet, count, max_len):
    return [Word(rng.choice(alphabet) for _ in range(rng.randint(0, max_len))) for _ in range(count)]


def test_c10_normal_forms():
    with criterion(10, "normal-form soundness", 60) as box:
        rng = random.Random(10)
        bad = []
        # brute-force membership: every reduced vertex-group word of length <= 6
        tables = {i: {c: tuple((1 if k == "a" else 2) * s for k, s in z)
                      for c, z in membership_table(i, 6).items()} for i in (0, 1, 2)}
        alphabet = signed([Letter(k, i, 1) for k in "xy" for i in (0, 1, 2)])
        n = 0
        for w in reduced_words(alphabet, 6):
            n += 1
            c = coordinates(w)
            got = membership_profile(w, T1, (0, 1, 2))
            for i in (0, 1, 2):
                if got[i] != tables[i].get(c):
                    bad.append((str(w), i))
        # idempotence and inverse consistency of every normalizer
        vt_al = signed([Letter(k, i, 1) for k in "xy" for i in range(6)] +
                       [Letter(k, nu, 1) for k in "ab" for nu in T2.peripherals])
        for w in _random_words(rng, vt_al, 300, 12):
            f = vt_normalize(w, T2)
            if not (vt_normalize(f.word(), T2) == f and vt_normalize(w * w.inverse(), T2).is_identity
                    and vt_normalize(w.inverse(), T2) == vt_normalize(f.word().inverse(), T2)):
                bad.append(("vt", str(w)))
        wt_al = signed([Letter(k, i, 1) for k in "xyt" for i in range(6)])
        for w in _random_words(rng, wt_al, 300, 10):
            f = wt_normalize(w, T2)
            if not (wt_normalize(f.word(), T2) == f and wt_normalize(w * w.inverse(), T2).is_identity
                    and wt_normalize(w.inverse(), T2) == wt_normalize(f.word().inverse(), T2)):
                bad.append(("wt", str(w)))
        g_al = signed([Letter(k, 0, 1) for k in "xyt"])
        for w in _random_words(rng, g_al, 300, 12):
            f = g_normalize(w)
            if not (g_normalize(f.word()) == f and g_normalize(w * w.inverse()).is_identity
                    and g_normalize(w.inverse()) == g_normalize(f.word().inverse())):
                bad.append(("g", str(w)))
        base = signed([Letter(k, i, 1) for k in "xy" for i in (0, 1, 2)] + [Letter("a", 0, 1), Letter("b", 0, 1)])
        for P, stable, extra in ((presentation_S(T1), "r", []),
                                 (presentation_G(T1, 1, coordinates="s"), "s", ["t", "c"]),
                                 (presentation_G(T1, 1, coordinates="u"), "u", ["t", "c"])):
            al = base + signed([Letter(stable, 1, 1), Letter(stable, 2, 1)] + [Letter(k, 0, 1) for k in extra])
            for w in _random_words(rng, al, 150, 10):
                f = britton_normalize(w, P)
                again = britton_normalize(f.word(), P)
                if not (again.word() == f.word() and britton_normalize(w * w.inverse(), P).is_identity
                        and britton_normalize(f.word() * w.inverse(), P).is_identity):
                    bad.append((stable, str(w)))
        box["ok"] = not bad
        box["detail"] = f"{n} vertex-group words against the membership oracle, 1350 normalizer samples, " \
                        f"{len(bad)} failures {bad[:3]}"
    assert box["passed"]
