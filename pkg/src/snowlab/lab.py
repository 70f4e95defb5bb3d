"""Experiment drivers: Dehn-exponent fit, distortion witnesses, balancing and embedding fuzz."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .aut import PHI, FreeAut, cached_power, codes_of, fapply, freduce, transition, word_of
from .builders import snowflake_sizes
from .corridor import balancing_check, random_reduced
from .exactnum import QuadNum, mat_pow
from .groups import embedding_map, presentation_G, presentation_S, presentation_VT, untwist
from .normalform import britton_normalize, is_trivial, reduced_peripheral_word
from .treegeom import SnowTree, build_snowtree, nxt
from .words import D1, D2, Letter, Word, reduce, reletter, weighted_length


class HypothesisViolated(UserWarning):
    """alpha < 1: the report is still computed but flagged with alpha_ge_one = False."""


def alpha_of(T: SnowTree, n: int, phi: FreeAut = PHI) -> float:
    lam = transition(phi).lam
    return n * math.log(float(lam)) / math.log(T.m)


def _log_ratio(a: int, b: int) -> float:
    # exact integers, logs last; math.log handles big ints directly
    return math.log(a) - math.log(b)


@dataclass
class ExponentReport:
    tree: dict
    n: int
    phi: str
    alpha: float
    target: float
    points: list[tuple[int, int]]  # (perimeter, area) per depth 0..d_max
    slopes: list[float]
    estimate: float
    residual: float
    low_confidence: bool = False
    alpha_ge_one: bool = True

    def as_rows(self) -> list[dict]:
        rows = []
        for d, (p, a) in enumerate(self.points):
            rows.append({"depth": d, "perimeter": p, "area": a,
                         "slope": self.slopes[d - 1] if d >= 1 else ""})
        return rows


def dehn_fit(T: SnowTree | None = None, n: int = 1, phi: FreeAut = PHI, w="x", d_max: int = 12,
             strict: bool = False) -> ExponentReport:
    """Successive log-log slopes of area against perimeter along the snowflake family.

    Slope s_d uses depths d-1 and d, so the last slope lives at d_max.
    """
    T = T or build_snowtree()
    a = alpha_of(T, n, phi)
    if a < 1 and strict:
        raise HypothesisViolated(f"alpha = {a:.4f} < 1")
    pts = []
    for d in range(d_max + 1):
        r = snowflake_sizes(w, d, T, n, phi)
        pts.append((r.perimeter, r.area))
    slopes = [_log_ratio(pts[d][1], pts[d - 1][1]) / _log_ratio(pts[d][0], pts[d - 1][0])
              for d in range(1, d_max + 1)]
    est = slopes[-1] if slopes else float("nan")
    from .aut import format_free
    return ExponentReport(T.to_json(), n, f"x->{format_free(phi.image_x)}, y->{format_free(phi.image_y)}",
                          a, 2 * a, pts, slopes, est, abs(est - 2 * a), low_confidence=d_max <= 1,
                          alpha_ge_one=a >= 1)


# ----------------------------------------------------------------- distortion

@dataclass
class DistortionReport:
    alpha: float
    lengths: list[int]  # |W_d|
    weighted_lengths: list[QuadNum]  # <<W_d>>
    g_weighted: list[QuadNum]  # <<g_d>>
    ratios: list[float]
    certified: dict[int, bool] = field(default_factory=dict)
    fuzz_ratios: list[float] = field(default_factory=list)
    m: int = 2

    @property
    def band(self) -> float:
        rs = self.ratios[1:]
        return max(rs) / min(rs) if rs else 1.0

    @property
    def recurrence_ok(self) -> bool:
        return all(self.lengths[d] == self.m * (self.lengths[d - 1] + 2) for d in range(1, len(self.lengths)))


def witness_words(T: SnowTree, w: Word, d: int) -> list[Word]:
    nu0 = T.peripherals[0]
    cur = reletter(w, ("a", nu0), ("b", nu0))
    out = [cur]
    for _ in range(d):
        prod = Word()
        for i in range(1, T.m + 1):
            prod = prod * Word([Letter("r", i, 1)]) * cur * Word([Letter("r", i, -1)])
        cur = prod.inverse()
        out.append(cur)
    return out


def distortion_witness(T: SnowTree, n: int, phi: FreeAut, w, d: int) -> tuple[Word, Word]:
    """(W_d, g_d) with g_d = phi^{dn}(w) read in a_nu0, b_nu0."""
    w = Word.parse(w) if isinstance(w, str) else w
    nu0 = T.peripherals[0]
    Wd = witness_words(T, w, d)[-1]
    g = word_of(fapply(cached_power(phi, d * n).codes, codes_of(w)), "a", "b", nu0)
    return Wd, g


def _weighted_image(M, counts, k: int, d1, d2):
    nx, ny = mat_pow(M, k).apply(counts)
    return d1 * nx + d2 * ny


def distortion_report(T: SnowTree | None = None, n: int = 1, phi: FreeAut = PHI, w="x", d_max: int = 10,
                      certify_upto: int = 3, fuzz: int = 0, seed: int = 0) -> DistortionReport:
    T = T or build_snowtree()
    w = Word.parse(w) if isinstance(w, str) else w
    ed = transition(phi)
    d1, d2 = ed.left_vector
    a = alpha_of(T, n, phi)
    c = codes_of(w)
    counts = (sum(1 for v in c if abs(v) == 1), sum(1 for v in c if abs(v) == 2))
    Ws = witness_words(T, w, d_max)
    lens = [len(x) for x in Ws]
    wl = [weighted_length(x, d1, d2) for x in Ws]
    gw = [_weighted_image(ed.matrix, counts, d * n, d1, d2) for d in range(d_max + 1)]
    ratios = [float(g) / float(x) ** a for g, x in zip(gw, wl)]
    rep = DistortionReport(a, lens, wl, gw, ratios, m=T.m)
    S = presentation_S(T, n, phi)
    for d in range(min(certify_upto, d_max) + 1):
        Wd, g = distortion_witness(T, n, phi, w, d)
        rep.certified[d] = britton_normalize(Wd * g.inverse(), S).is_identity
    rng = random.Random(seed)
    for _ in range(fuzz):
        u = random_palindromic_monotone(rng, rng.randint(1, 4))
        dd = rng.randint(1, 6)
        uc = codes_of(u)
        uct = (sum(1 for v in uc if v == 1), sum(1 for v in uc if v == 2))
        gx = _weighted_image(ed.matrix, uct, dd * n, d1, d2)
        wx = weighted_length(witness_words(T, u, dd)[-1], d1, d2)
        rep.fuzz_ratios.append(float(gx) / float(wx) ** a)
    return rep


def random_palindromic_monotone(rng: random.Random, half: int) -> Word:
    """Positive palindrome of length 2*half - 1 over x, y."""
    h = [rng.choice("xy") for _ in range(half)]
    return Word.parse("".join(h + h[-2::-1]))


# ----------------------------------------------------------------- balancing fuzz

@dataclass
class FuzzConfig:
    samples: int = 1000
    depth: int = 20
    insertions: int = 10
    max_z: int = 8
    seed: int = 0


@dataclass
class BalancingReport:
    samples: int = 0
    violations: list[str] = field(default_factory=list)
    nf_mismatches: int = 0
    standard_word_checks: int = 0
    tight: int = 0  # samples where some bound is attained

    @property
    def ok(self) -> bool:
        return not self.violations and self.nf_mismatches == 0


def _definition(kind: str, i: int, sign: int) -> list[Letter]:
    """a_i = x_i^-1 x_{i+1}, b_i = y_i^-1 y_{i+1} (from the triangle relators)."""
    k = "x" if kind == "a" else "y"
    seq = [Letter(k, i, -1), Letter(k, nxt(i), 1)]
    return seq if sign > 0 else [l.inv() for l in reversed(seq)]


def _standardize(w: Word, T: SnowTree) -> list[Letter]:
    per = set(T.peripherals)
    out = []
    for l in w.letters:
        if l.kind in "ab" and l.index not in per:
            out += _definition(l.kind, l.index, l.sign)
        else:
            out.append(l)
    return out


def standard_letters(T: SnowTree) -> list[Letter]:
    out = []
    for v in range(T.n_vertices):
        for i in (3 * v, 3 * v + 1, 3 * v + 2):
            out += [Letter("x", i, 1), Letter("y", i, 1)]
    for nu in T.peripherals:
        out += [Letter("a", nu, 1), Letter("b", nu, 1)]
    return out


def _random_word(rng: random.Random, alphabet: list[Letter], k: int) -> list[Letter]:
    return [l if rng.random() < 0.5 else l.inv() for l in (rng.choice(alphabet) for _ in range(k))]


def scramble(z: Word, T: SnowTree, rng: random.Random, depth: int = 20, insertions: int = 10) -> Word:
    """A word in standard generators equal to z(a_nu0, b_nu0) in V_T."""
    nu0 = T.peripherals[0]
    P = presentation_VT(T)
    rels = [_standardize(r.word, T) for r in P.relators] + [_standardize(x, T) for x in P.extra_relations]
    rels = [r for r in rels if reduce(Word(r))]
    alphabet = standard_letters(T)
    w = list(reletter(z, ("a", nu0), ("b", nu0)).letters)
    moves = ["rel"] * insertions + [rng.choice(("free", "define")) for _ in range(depth)]
    rng.shuffle(moves)
    for mv in moves:
        pos = rng.randint(0, len(w))
        if mv == "rel":
            r = rng.choice(rels)
            if rng.random() < 0.5:
                r = [l.inv() for l in reversed(r)]
            g = _random_word(rng, alphabet, rng.randint(0, 3))
            w[pos:pos] = g + r + [l.inv() for l in reversed(g)]
        elif mv == "free":
            l = _random_word(rng, alphabet, 1)[0]
            w[pos:pos] = [l, l.inv()]
        else:
            ks = [k for k, l in enumerate(w) if l.kind in "ab"]
            if ks:
                k = rng.choice(ks)
                l = w[k]
                w[k:k + 1] = _definition(l.kind, l.index, l.sign)
    return Word(w)


def balancing_fuzz(T: SnowTree | None = None, samples: int = 1000, seed: int = 0,
                   cfg: FuzzConfig | None = None) -> BalancingReport:
    T = T or build_snowtree()
    cfg = cfg or FuzzConfig(samples=samples, seed=seed)
    rng = random.Random(cfg.seed)
    nu0 = T.peripherals[0]
    rep = BalancingReport()
    for k in range(cfg.samples):
        zc = random_reduced(rng, rng.randint(0, cfg.max_z)) if k % 50 else ()
        if k % 10 == 9 and zc:
            zc = zc + zc[-2::-1]  # palindrome, still reduced
        z = word_of(zc, "a", "b", nu0)
        if k % 10 == 9 and zc:
            # tail of a standard word: for a palindrome, w(nu_1) ... w(nu_m) equals w(nu_0)^-1
            w = Word()
            for nu in T.peripherals[1:]:
                w = w * reletter(z, ("a", nu), ("b", nu))
            z = z.inverse()
            rep.standard_word_checks += 1
            if len(w) < T.m * len(z):
                rep.violations.append(f"standard word shorter than m|z|: {w}")
        else:
            w = scramble(z, T, rng, cfg.depth, cfg.insertions)
        zz = reduced_peripheral_word(w, nu0, T)
        if zz != reduce(z):
            rep.nf_mismatches += 1
            continue
        chk = balancing_check(w, T)
        rep.samples += 1
        if chk is None:
            rep.nf_mismatches += 1
            continue
        rep.violations += [f"{w}: {v}" for v in chk.violations]
        if any(chk.z_length == r for r in chk.rhs.values()):
            rep.tight += 1
    return rep


# ----------------------------------------------------------------- embedding fuzz

@dataclass
class EmbeddingReport:
    relator_failures: dict[str, int] = field(default_factory=dict)
    nontrivial_tested: int = 0
    nontrivial_failures: int = 0
    trivial_tested: int = 0
    trivial_failures: int = 0
    untwist_tested: int = 0
    untwist_failures: int = 0

    @property
    def ok(self) -> bool:
        return (not any(self.relator_failures.values()) and self.nontrivial_failures == 0
                and self.trivial_failures == 0 and self.untwist_failures == 0)


def _s_alphabet(T: SnowTree) -> list[Letter]:
    return standard_letters(T) + [Letter("r", i, 1) for i in range(1, T.m + 1)]


def random_trivial(rng: random.Random, P, alphabet: list[Letter], k: int) -> Word:
    out = Word()
    for _ in range(k):
        r = rng.choice(P.relators).word
        if rng.random() < 0.5:
            r = r.inverse()
        g = Word(_random_word(rng, alphabet, rng.randint(0, 3)))
        out = out * g * r * g.inverse()
    return reduce(out)


def embedding_fuzz(T: SnowTree | None = None, n: int = 1, phi: FreeAut = PHI, samples: int = 500,
                   seed: int = 0, trivial_samples: int = 100, untwist_samples: int = 100,
                   max_len: int = 12) -> EmbeddingReport:
    T = T or build_snowtree()
    rng = random.Random(seed)
    S = presentation_S(T, n, phi)
    emb = {c: embedding_map(T, n, phi, c) for c in ("u", "s")}
    Gs = presentation_G(T, n, phi, "s")
    Gu, s_to_u, u_to_s = untwist(Gs)
    rep = EmbeddingReport()
    for c, f in emb.items():
        rep.relator_failures[c] = len(f.check())
    alphabet = _s_alphabet(T)
    while rep.nontrivial_tested < samples:
        w = Word(_random_word(rng, alphabet, rng.randint(1, max_len)))
        if is_trivial(w, S):
            continue
        rep.nontrivial_tested += 1
        if any(is_trivial(f(w), f.target) for f in emb.values()):
            rep.nontrivial_failures += 1
    for _ in range(trivial_samples):
        w = random_trivial(rng, S, alphabet, rng.randint(1, 3))
        rep.trivial_tested += 1
        if not is_trivial(w, S) or not all(is_trivial(f(w), f.target) for f in emb.values()):
            rep.trivial_failures += 1
    for _ in range(untwist_samples):
        w = Word(_random_word(rng, alphabet, rng.randint(1, max_len)))
        ws, wu = emb["s"](w), emb["u"](w)
        rep.untwist_tested += 1
        bad = reduce(u_to_s(wu)) != reduce(ws)  # word level: r -> u -> c s agrees with r -> c s
        bad |= reduce(u_to_s(s_to_u(ws))) != reduce(ws)
        bad |= not is_trivial(s_to_u(ws) * wu.inverse(), Gu)
        rep.untwist_failures += bad
    return rep
