"""DOT and SVG output for diagrams; SVG uses a Tutte embedding with the boundary on a circle."""
from __future__ import annotations

import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import spsolve

from .diagram import FTYPES, Diagram, decode

FACE_COLORS = {"triangle": "#cfe3f7", "quad": "#f7e3b0", "r": "#f4b6b6", "s": "#d8c8f0", "u": "#c8f0d0", "G": "#e0e0e0"}


def to_dot(d: Diagram) -> str:
    lines = ["graph diagram {", "  node [shape=point];"]
    tw = d.twin
    for x in range(d.n_darts):
        if tw[x] < 0 or x < tw[x]:
            lines.append(f'  {d.tail[x]} -- {d.head[x]} [label="{decode(int(d.code[x]))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def tutte_layout(d: Diagram) -> np.ndarray:
    nv = int(max(d.tail.max(initial=0), d.head.max(initial=0))) + 1
    pos = np.zeros((nv, 2))
    bw = d.boundary_walk()
    ring = []
    for x in bw:
        v = int(d.tail[x])
        if v not in ring:
            ring.append(v)
    fixed = np.zeros(nv, dtype=bool)
    for k, v in enumerate(ring):
        t = 2 * math.pi * k / max(len(ring), 1)
        pos[v] = (math.cos(t), math.sin(t))
        fixed[v] = True
    free = np.nonzero(~fixed)[0]
    if len(free) == 0:
        return pos
    idx = -np.ones(nv, dtype=np.int64)
    idx[free] = np.arange(len(free))
    a, b = d.tail.astype(np.int64), d.head.astype(np.int64)
    # both directions of every dart; degrees counted with multiplicity
    src = np.concatenate([a, b])
    dst = np.concatenate([b, a])
    keep = (~fixed[src]) & (src != dst)
    src, dst = src[keep], dst[keep]
    deg = np.bincount(idx[src], minlength=len(free)).astype(float)
    inner = ~fixed[dst]
    rows = np.concatenate([idx[src[inner]], np.arange(len(free))])
    cols = np.concatenate([idx[dst[inner]], np.arange(len(free))])
    vals = np.concatenate([-np.ones(int(inner.sum())), deg])
    A = coo_matrix((vals, (rows, cols)), shape=(len(free), len(free))).tocsr()
    rhs = np.zeros((len(free), 2))
    np.add.at(rhs, idx[src[~inner]], pos[dst[~inner]])
    sol = np.column_stack([spsolve(A, rhs[:, 0]), spsolve(A, rhs[:, 1])])
    pos[free] = sol
    return pos


def to_svg(d: Diagram, size: int = 800, highlight: dict[int, str] | None = None) -> str:
    """Faces colored by type; `highlight` maps face ids to overlay colors (e.g. corridor cells)."""
    pos = tutte_layout(d)
    s = size / 2.2
    xy = lambda v: (size / 2 + s * pos[v, 0], size / 2 - s * pos[v, 1])
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">']
    highlight = highlight or {}
    for f in range(d.n_faces):
        darts = range(d.face_ptr[f], d.face_ptr[f + 1])
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in (xy(int(d.tail[k])) for k in darts))
        col = highlight.get(f, FACE_COLORS.get(FTYPES[int(d.face_type[f])], "#ffffff"))
        out.append(f'<polygon points="{pts}" fill="{col}" stroke="#333" stroke-width="0.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
