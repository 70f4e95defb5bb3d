"""Witness ratios <<g_d>> / <<W_d>>^alpha for the edge-group distortion."""
from __future__ import annotations

import argparse
import csv
from pathlib import Path

from snowlab.lab import distortion_report
from snowlab.treegeom import build_snowtree


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=10)
    ap.add_argument("--word", default="x")
    ap.add_argument("--out", default="out")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "distortion.csv"
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["tree_vertices", "n", "depth", "W_length", "W_weighted", "g_weighted", "ratio", "certified"])
        for edges in ([], [[0, 1]]):
            T = build_snowtree(edges)
            for n in (1, 2):
                rep = distortion_report(T, n, w=args.word, d_max=args.depth)
                for d in range(args.depth + 1):
                    wr.writerow([T.n_vertices, n, d, rep.lengths[d], float(rep.weighted_lengths[d]),
                                 float(rep.g_weighted[d]), rep.ratios[d], rep.certified.get(d, "")])
                print(f"|T|={T.n_vertices} n={n}: alpha {rep.alpha:.4f}  band {rep.band:.3f}")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
