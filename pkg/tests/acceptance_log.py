"""Collects one result line per acceptance criterion; printed at the end of the pytest run."""
from __future__ import annotations

import time
from contextlib import contextmanager

LINES: dict[int, str] = {}


@contextmanager
def criterion(k: int, title: str, limit_s: float):
    """Times the block; the block sets box["ok"] and box["detail"]. Exceeding limit_s fails it."""
    box = {"ok": False, "detail": "did not finish"}
    t0 = time.perf_counter()
    try:
        yield box
    finally:
        dt = time.perf_counter() - t0
        ok = bool(box["ok"]) and dt < limit_s
        tag = "PASS" if ok else "FAIL"
        LINES[k] = f"[{tag}] {k:2d}. {title}: {box['detail']} ({dt:.1f} s, limit {limit_s:g} s)"
        box["passed"] = ok
