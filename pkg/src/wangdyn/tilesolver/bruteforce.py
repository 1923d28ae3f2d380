"""Exhaustive backtracking over tiny windows: the completeness oracle.

Independent of the CNF route on purpose; used to cross-check the CDCL
engine's SAT/UNSAT answers at micro scale.
"""

from __future__ import annotations

from typing import Iterator, Mapping, Optional

from ..wangcore import Patch, Protoset


def enumerate_patches(protoset: Protoset, width: int, height: int,
                      preassigned: Optional[Mapping] = None,
                      limit: Optional[int] = None) -> Iterator[Patch]:
    """Yield every valid fully-assigned patch, row-major tile order."""
    preassigned = dict(preassigned or {})
    n = len(protoset)
    tiles = protoset.tiles
    cells = [-1] * (width * height)
    found = 0

    def candidates(pos: int):
        x, y = pos % width, pos // width
        fixed = preassigned.get((x, y))
        opts = range(n) if fixed is None else (fixed,)
        left = cells[pos - 1] if x > 0 else None
        below = cells[pos - width] if y > 0 else None
        for t in opts:
            if left is not None and tiles[left].r != tiles[t].l:
                continue
            if below is not None and tiles[below].t != tiles[t].b:
                continue
            yield t

    def rec(pos: int):
        nonlocal found
        if limit is not None and found >= limit:
            return
        if pos == len(cells):
            found += 1
            yield Patch((0, 0), width, height, list(cells))
            return
        for t in candidates(pos):
            cells[pos] = t
            yield from rec(pos + 1)
            cells[pos] = -1
            if limit is not None and found >= limit:
                return

    yield from rec(0)


def brute_solve(protoset: Protoset, width: int, height: int,
                preassigned: Optional[Mapping] = None) -> Optional[Patch]:
    """First valid patch in enumeration order, or None when UNSAT."""
    for patch in enumerate_patches(protoset, width, height, preassigned, limit=1):
        return patch
    return None


def brute_count(protoset: Protoset, width: int, height: int,
                preassigned: Optional[Mapping] = None,
                cap: int = 10**9) -> int:
    count = 0
    for _ in enumerate_patches(protoset, width, height, preassigned, limit=cap):
        count += 1
    return count
