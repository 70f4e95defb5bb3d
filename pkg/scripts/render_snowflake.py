"""Materialize a small snowflake diagram and write SVG and DOT renderings of it."""
from __future__ import annotations

import argparse
from pathlib import Path

from snowlab.builders import snowflake
from snowlab.corridor import trace
from snowlab.render import to_dot, to_svg
from snowlab.treegeom import build_snowtree, r_scheme


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--word", default="x")
    ap.add_argument("--depth", type=int, default=1)
    ap.add_argument("-n", type=int, default=1)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()
    D, rep = snowflake(args.word, args.depth, build_snowtree(), args.n)
    cells = {f: "#e05050" for c in trace(D, r_scheme(1)) for f in c.cells}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"snowflake_{args.word}_d{args.depth}_n{args.n}"
    (out / f"{stem}.svg").write_text(to_svg(D, highlight=cells))
    (out / f"{stem}.dot").write_text(to_dot(D))
    print(f"faces {D.n_faces}, perimeter {rep.perimeter}, area {rep.area}; wrote {out / stem}.svg/.dot")


if __name__ == "__main__":
    main()
