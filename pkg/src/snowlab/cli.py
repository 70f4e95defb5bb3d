"""Command line driver. Every subcommand exits 0 iff the properties it asserts hold."""
from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click

from .aut import PHI, FreeAut
from .treegeom import FIG_TREE, SnowTree, build_snowtree, r_scheme, scheme_for_segment, segment


def _json_default(o):
    if hasattr(o, "a") and hasattr(o, "b"):  # QuadNum
        return str(o)
    if hasattr(o, "tolist"):
        return o.tolist()
    return str(o)


class Ctx:
    def __init__(self, tree: SnowTree, n: int, phi: FreeAut, seed: int, out: Path):
        self.tree, self.n, self.phi, self.seed, self.out = tree, n, phi, seed, out

    def write_json(self, name: str, obj) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        p = self.out / name
        p.write_text(json.dumps(obj, indent=2, default=_json_default))
        return p

    def write_csv(self, name: str, rows: list[dict]) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        p = self.out / name
        with p.open("w", newline="") as fh:
            if rows:
                wr = csv.DictWriter(fh, fieldnames=list(rows[0]))
                wr.writeheader()
                for r in rows:
                    wr.writerow({k: _json_default(v) if not isinstance(v, (int, float, str)) else v
                                 for k, v in r.items()})
        return p

    def write_text(self, name: str, text: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        p = self.out / name
        p.write_text(text)
        return p


def _load_tree(spec: str | None) -> SnowTree:
    if not spec:
        return build_snowtree()
    if spec == "fig":
        return build_snowtree(FIG_TREE)
    p = Path(spec)
    return build_snowtree(json.loads(p.read_text()) if p.exists() else json.loads(spec))


def _load_phi(spec: str | None) -> FreeAut:
    if not spec:
        return PHI
    p = Path(spec)
    obj = json.loads(p.read_text()) if p.exists() else json.loads(spec)
    return FreeAut.parse(obj["x"], obj["y"])


def _finish(ok: bool, msg: str) -> None:
    click.echo(("PASS " if ok else "FAIL ") + msg)
    sys.exit(0 if ok else 1)


@click.group()
@click.option("--tree", default=None, help='Tree as JSON {"edges": [[u, v], ...]}, a path, or "fig".')
@click.option("-n", "n", default=1, show_default=True, type=int, help="Power of the automorphism.")
@click.option("--phi", default=None, help='Automorphism as JSON {"x": "xyx", "y": "x"} or a path.')
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", default="out", show_default=True, type=click.Path(file_okay=False))
@click.pass_context
def main(ctx, tree, n, phi, seed, out):
    """Snowflake group workbench."""
    ctx.obj = Ctx(_load_tree(tree), n, _load_phi(phi), seed, Path(out))


@main.command()
@click.argument("kind", type=click.Choice(["V", "V_T", "W_T", "S", "G_s", "G_u"]))
@click.pass_obj
def presentation(c: Ctx, kind):
    """Write a presentation as JSON and as a relator list."""
    from . import groups
    T = c.tree
    p = {"V": lambda: groups.presentation_V(), "V_T": lambda: groups.presentation_VT(T),
         "W_T": lambda: groups.presentation_WT(T, c.n, c.phi), "S": lambda: groups.presentation_S(T, c.n, c.phi),
         "G_s": lambda: groups.presentation_G(T, c.n, c.phi, "s"),
         "G_u": lambda: groups.presentation_G(T, c.n, c.phi, "u")}[kind]()
    c.write_json(f"presentation_{kind}.json", p.to_json())
    c.write_text(f"presentation_{kind}.txt", p.relator_text())
    _finish(True, f"{kind}: {len(p.generators)} generators, {len(p.relators)} relators")


@main.command()
@click.argument("word", default="x")
@click.option("--depth", "-d", default=1, show_default=True, type=int)
@click.option("--materialize/--sizes-only", default=True, show_default=True)
@click.option("--svg/--no-svg", default=False)
@click.pass_obj
def snowflake(c: Ctx, word, depth, materialize, svg):
    """Snowflake diagram sizes; when materialized, check them against the closed form."""
    from .builders import TooLarge, snowflake as build, snowflake_sizes
    from .diagram import validate
    from .groups import presentation_S
    pred = snowflake_sizes(word, depth, c.tree, c.n, c.phi)
    c.write_json(f"snowflake_d{depth}_sizes.json", pred.as_row())
    if not materialize:
        _finish(pred.lower_bound_ok, f"sizes: area={pred.area} perimeter={pred.perimeter}")
    try:
        d, meas = build(word, depth, c.tree, c.n, c.phi)
    except TooLarge as e:
        _finish(False, str(e))
    c.write_json(f"snowflake_d{depth}.json", d.to_json())
    c.write_csv(f"snowflake_d{depth}.csv", [pred.as_row(), meas.as_row()])
    if svg:
        from .render import to_svg
        c.write_text(f"snowflake_d{depth}.svg", to_svg(d))
    same = all(getattr(pred, k) == getattr(meas, k) for k in ("area", "perimeter", "r_count", "faces",
                                                            "weighted_perimeter"))
    ok = same and (d.n_faces > 200_000 or validate(d, presentation_S(c.tree, c.n, c.phi)).ok)
    _finish(ok, f"area={meas.area} perimeter={meas.perimeter} r={meas.r_count} closed form match={same}")


def _parse_scheme(spec: str, T: SnowTree):
    kind, _, rest = spec.partition(":")
    if kind == "r":
        return [r_scheme(int(rest))]
    if kind == "sigma":
        p, q = (int(x) for x in rest.split(","))
        return [scheme_for_segment(T, segment(T, p, q))]
    if kind == "all-sigma":
        from .corridor import sigma_schemes
        return sigma_schemes(T)
    if kind == "all-r":
        return [r_scheme(i) for i in range(1, T.m + 1)]
    raise click.BadParameter(f"unknown scheme {spec!r} (r:i, sigma:p,q, all-sigma, all-r)")


@main.command()
@click.option("--diagram", "diagram_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--word", default=None, help="Build a diagram of this word instead of loading one.")
@click.option("--kind", default="canonical", type=click.Choice(["canonical", "doubled"]))
@click.option("--scheme", default="all-sigma", show_default=True)
@click.option("--svg/--no-svg", default=False)
@click.pass_obj
def corridors(c: Ctx, diagram_path, word, kind, scheme, svg):
    """Trace corridors; checks orientation, unlinked bands and the area certificate."""
    from .builders import canonical_diagram, doubled_canonical
    from .corridor import bands_unlinked, lower_bound_certificate, orientation_check, trace
    from .diagram import Diagram, area
    if diagram_path:
        d = Diagram.from_json(json.loads(Path(diagram_path).read_text()))
    else:
        d = (canonical_diagram if kind == "canonical" else doubled_canonical)(word or "x", c.tree)
    rows, ok = [], True
    cells = {}
    for s in _parse_scheme(scheme, c.tree):
        cs = trace(d, s)
        o = orientation_check(d, s, cs)
        u = bands_unlinked(d, cs)
        ok &= o and u and not any(x.kind == "broken" for x in cs)
        rows.append({"scheme": f"{s.family}:{s.tag}", "bands": sum(x.kind == "band" for x in cs),
                     "annuli": sum(x.kind == "annulus" for x in cs), "broken": sum(x.kind == "broken" for x in cs),
                     "oriented": o, "unlinked": u})
        for k, x in enumerate(cs):
            for f in x.cells:
                cells[f] = ["#e06666", "#6aa84f", "#3d85c6", "#f1c232"][k % 4]
    c.write_csv("corridors.csv", rows)
    msg = f"{len(rows)} schemes"
    if scheme == "all-sigma" and not diagram_path:
        cert, a = lower_bound_certificate(d, c.tree), area(d)
        ok &= cert == a
        msg += f", certificate {cert} vs area {a}"
    if svg:
        from .render import to_svg
        c.write_text("corridors.svg", to_svg(d, highlight=cells))
    _finish(ok, msg)


@main.command()
@click.argument("word", default="a")
@click.option("-i", "stable", default=1, show_default=True, type=int)
@click.option("--sweep", default=0, type=int, help="Also sweep K constants over this many random bottoms.")
@click.option("--max-length", default=50, show_default=True, type=int)
@click.pass_obj
def fold(c: Ctx, word, stable, sweep, max_length):
    """Folded r_i-corridor on a reduced bottom word in a, b."""
    from .aut import cached_power, fapply
    from .corridor import fold_corridor, measure_constants
    from .words import format_word
    fc = fold_corridor(word, stable, c.n, c.phi, c.tree)
    viol = fc.seam_violations()
    ok = not viol and fc.top == fapply(cached_power(c.phi, c.n).codes, fc.bottom)
    info = {"bottom": format_word(fc.bottom_word()), "top": format_word(fc.top_word()), "folds": fc.folds,
            "K0": fc.k0(), "L": fc.L, "seam_violations": viol}
    if sweep:
        r = measure_constants(c.n, c.phi, sweep, max_length, c.seed)
        info["constants"] = {k: v for k, v in r.__dict__.items() if k != "history"}
        c.write_csv("k0_history.csv", [{"sample": k + 1, "K0": v} for k, v in enumerate(r.history)])
        ok &= r.seam_violations == 0 and r.top_mismatches == 0
    c.write_json("fold.json", info)
    _finish(ok, f"top {info['top']} with {fc.folds} folds")


@main.command()
@click.argument("word")
@click.option("--group", "kind", default="S", show_default=True,
              type=click.Choice(["V_T", "W_T", "S", "G_s", "G_u"]))
@click.pass_obj
def nf(c: Ctx, word, kind):
    """Normal form of a word and whether it is trivial."""
    from . import groups
    from .normalform import normal_form
    T = c.tree
    p = {"V_T": lambda: groups.presentation_VT(T), "W_T": lambda: groups.presentation_WT(T, c.n, c.phi),
         "S": lambda: groups.presentation_S(T, c.n, c.phi), "G_s": lambda: groups.presentation_G(T, c.n, c.phi, "s"),
         "G_u": lambda: groups.presentation_G(T, c.n, c.phi, "u")}[kind]()
    w = groups.parse_in(p, word)
    f = normal_form(w, p)
    click.echo(f"{f}")
    click.echo("trivial" if f.is_identity else "nontrivial")
    sys.exit(0)


@main.command("dehn-fit")
@click.option("--word", default="x", show_default=True)
@click.option("--depth", default=12, show_default=True, type=int)
@click.option("--tol", default=0.05, show_default=True, type=float)
@click.pass_obj
def dehn_fit_cmd(c: Ctx, word, depth, tol):
    """Successive slopes of log area against log perimeter along the snowflake family."""
    from .lab import dehn_fit
    r = dehn_fit(c.tree, c.n, c.phi, word, depth)
    c.write_csv("dehn_fit.csv", r.as_rows())
    c.write_json("dehn_fit.json", {k: v for k, v in r.__dict__.items() if k != "points"})
    if not r.alpha_ge_one:
        click.echo(f"note: alpha = {r.alpha:.4f} < 1; the slope is reported but the lower-bound regime needs alpha >= 1")
    _finish(r.residual < tol, f"slope {r.estimate:.4f} vs 2*alpha {r.target:.4f}")


@main.command()
@click.option("--word", default="x", show_default=True)
@click.option("--depth", default=10, show_default=True, type=int)
@click.option("--fuzz", default=100, show_default=True, type=int)
@click.pass_obj
def distortion(c: Ctx, word, depth, fuzz):
    """Witness ratios <<g_d>> / <<W_d>>^alpha and Britton certificates."""
    from .lab import distortion_report
    r = distortion_report(c.tree, c.n, c.phi, word, depth, fuzz=fuzz, seed=c.seed)
    c.write_csv("distortion.csv", [{"d": d, "len_W": r.lengths[d], "W_weighted": float(r.weighted_lengths[d]),
                                    "g_weighted": float(r.g_weighted[d]), "ratio": r.ratios[d]}
                                   for d in range(len(r.ratios))])
    ok = r.band <= 10 and all(r.certified.values()) and r.recurrence_ok
    _finish(ok, f"band {r.band:.3f}, certified d<= {max(r.certified)}")


@main.command("balancing-fuzz")
@click.option("--samples", default=1000, show_default=True, type=int)
@click.option("--depth", default=20, show_default=True, type=int)
@click.option("--insertions", default=10, show_default=True, type=int)
@click.pass_obj
def balancing_fuzz_cmd(c: Ctx, samples, depth, insertions):
    """Scrambled words for edge-group elements against the balancing inequality."""
    from .lab import FuzzConfig, balancing_fuzz
    r = balancing_fuzz(c.tree, cfg=FuzzConfig(samples, depth, insertions, seed=c.seed))
    c.write_json("balancing.json", r.__dict__)
    _finish(r.ok, f"{r.samples} samples, {len(r.violations)} violations, {r.nf_mismatches} normal-form mismatches")


@main.command("embed-check")
@click.option("--samples", default=500, show_default=True, type=int)
@click.pass_obj
def embed_check(c: Ctx, samples):
    """Relator images, nontrivial words and untwist round trips for S -> G."""
    from .lab import embedding_fuzz
    r = embedding_fuzz(c.tree, c.n, c.phi, samples, c.seed)
    c.write_json("embedding.json", r.__dict__)
    _finish(r.ok, f"{r.nontrivial_tested} nontrivial words, {r.trivial_tested} trivial, "
                  f"{r.untwist_tested} untwist round trips")


if __name__ == "__main__":
    main()
