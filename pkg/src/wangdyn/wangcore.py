"""Wang tiles, protosets, finite patches, validity and the patch metric.

A patch is a rectangular window of tile indices over Z^2; cells may hold
the UNASSIGNED sentinel so solver partial states and preassignments reuse
the same type.  Only translations act on patches.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

UNASSIGNED = -1

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


class DuplicateTileError(ValueError):
    pass


class MalformedRecordError(ValueError):
    pass


class TileIndexError(IndexError):
    """Patch refers to a tile index outside the protoset."""


class NoCommonWindowError(ValueError):
    """Patches share no window containing the origin."""


class WangTile(NamedTuple):
    """Four colors (right, top, left, bottom), all non-negative."""

    r: int
    t: int
    l: int
    b: int


class Violation(NamedTuple):
    position: tuple[int, int]
    axis: str  # HORIZONTAL or VERTICAL
    colors: tuple[int, int]


class Protoset:
    """Ordered list of distinct Wang tiles; the index is the tile label."""

    __slots__ = ("tiles", "name", "_forbidden")

    def __init__(self, tiles: Iterable, name: str = ""):
        parsed = []
        for rec in tiles:
            rec = tuple(rec)
            if len(rec) != 4 or any((not isinstance(c, int)) or c < 0 for c in rec):
                raise MalformedRecordError(f"bad tile record {rec!r}")
            parsed.append(WangTile(*rec))
        if not parsed:
            raise MalformedRecordError("empty protoset")
        if len(set(parsed)) != len(parsed):
            dup = next(t for t in parsed if parsed.count(t) > 1)
            raise DuplicateTileError(f"duplicate tile {tuple(dup)}")
        object.__setattr__(self, "tiles", tuple(parsed))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_forbidden", None)

    def __setattr__(self, *_):
        raise AttributeError("Protoset is immutable")

    def __len__(self):
        return len(self.tiles)

    def __getitem__(self, i) -> WangTile:
        return self.tiles[i]

    def __iter__(self):
        return iter(self.tiles)

    def __eq__(self, other):
        return isinstance(other, Protoset) and self.tiles == other.tiles

    def __hash__(self):
        return hash(self.tiles)

    def forbidden_pairs(self) -> tuple[frozenset, frozenset]:
        """(horizontal, vertical) forbidden ordered index pairs.

        (i, j) is horizontally forbidden when Right(T_i) != Left(T_j), i.e.
        T_j may not sit immediately right of T_i; vertically when
        Top(T_i) != Bottom(T_j), i.e. T_j may not sit immediately above T_i.
        """
        cached = self._forbidden
        if cached is None:
            n = len(self.tiles)
            horiz = frozenset(
                (i, j)
                for i in range(n)
                for j in range(n)
                if self.tiles[i].r != self.tiles[j].l
            )
            vert = frozenset(
                (i, j)
                for i in range(n)
                for j in range(n)
                if self.tiles[i].t != self.tiles[j].b
            )
            cached = (horiz, vert)
            object.__setattr__(self, "_forbidden", cached)
        return cached

    def to_records(self) -> list[list[int]]:
        return [list(t) for t in self.tiles]


def load_protoset(records: Iterable, name: str = "") -> Protoset:
    return Protoset(records, name=name)


class Patch:
    """Rectangular window of tile indices, row-major from the origin corner.

    cells[k] is the tile at (origin_x + k % width, origin_y + k // width).
    """

    __slots__ = ("origin", "width", "height", "cells")

    def __init__(self, origin: tuple[int, int], width: int, height: int,
                 cells: Sequence[int]):
        if width <= 0 or height <= 0:
            raise ValueError("patch dimensions must be positive")
        cells = tuple(int(c) for c in cells)
        if len(cells) != width * height:
            raise ValueError("cell count does not match width*height")
        if any(c < UNASSIGNED for c in cells):
            raise ValueError("cell indices must be >= -1")
        object.__setattr__(self, "origin", (int(origin[0]), int(origin[1])))
        object.__setattr__(self, "width", int(width))
        object.__setattr__(self, "height", int(height))
        object.__setattr__(self, "cells", cells)

    def __setattr__(self, *_):
        raise AttributeError("Patch is immutable")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], origin=(0, 0)) -> "Patch":
        """Rows listed bottom-to-top (row 0 is the origin row)."""
        h = len(rows)
        w = len(rows[0])
        cells = [c for row in rows for c in row]
        return cls(origin, w, h, cells)

    def bounds(self) -> tuple[int, int, int, int]:
        """(xmin, ymin, xmax, ymax), inclusive."""
        ox, oy = self.origin
        return ox, oy, ox + self.width - 1, oy + self.height - 1

    def contains(self, x: int, y: int) -> bool:
        ox, oy = self.origin
        return ox <= x < ox + self.width and oy <= y < oy + self.height

    def get(self, x: int, y: int) -> int:
        if not self.contains(x, y):
            raise IndexError(f"({x},{y}) outside patch window")
        ox, oy = self.origin
        return self.cells[(y - oy) * self.width + (x - ox)]

    def positions(self):
        ox, oy = self.origin
        for k in range(len(self.cells)):
            yield (ox + k % self.width, oy + k // self.width)

    def is_fully_assigned(self) -> bool:
        return UNASSIGNED not in self.cells

    def __eq__(self, other):
        return (
            isinstance(other, Patch)
            and self.origin == other.origin
            and self.width == other.width
            and self.height == other.height
            and self.cells == other.cells
        )

    def __hash__(self):
        return hash((self.origin, self.width, self.height, self.cells))

    def __repr__(self):
        return f"Patch(origin={self.origin}, {self.width}x{self.height})"


def shift_patch(patch: Patch, n: tuple[int, int]) -> Patch:
    """Translate by n: cell content preserved, origin moved."""
    ox, oy = patch.origin
    return Patch((ox + n[0], oy + n[1]), patch.width, patch.height, patch.cells)


def check_validity(patch: Patch, protoset: Protoset) -> list[Violation]:
    """All adjacency violations, row-major, horizontal before vertical.

    UNASSIGNED cells are skipped.  A horizontal violation at (x, y) is a
    color clash between (x, y) and (x+1, y); vertical between (x, y) and
    (x, y+1).
    """
    n = len(protoset)
    w, h = patch.width, patch.height
    ox, oy = patch.origin
    cells = patch.cells
    for c in cells:
        if c >= n:
            raise TileIndexError(f"tile index {c} out of range for |T|={n}")
    tiles = protoset.tiles
    out: list[Violation] = []
    for j in range(h):
        base = j * w
        for i in range(w):
            c = cells[base + i]
            if c == UNASSIGNED:
                continue
            if i + 1 < w:
                east = cells[base + i + 1]
                if east != UNASSIGNED and tiles[c].r != tiles[east].l:
                    out.append(
                        Violation((ox + i, oy + j), HORIZONTAL,
                                  (tiles[c].r, tiles[east].l))
                    )
            if j + 1 < h:
                north = cells[base + w + i]
                if north != UNASSIGNED and tiles[c].t != tiles[north].b:
                    out.append(
                        Violation((ox + i, oy + j), VERTICAL,
                                  (tiles[c].t, tiles[north].b))
                    )
    return out


class ConfigDistance(NamedTuple):
    value: Fraction
    agrees_on_window: bool


def config_distance(x: Patch, y: Patch) -> ConfigDistance:
    """Metric 1/2^m, m the least Chebyshev norm of a disagreement.

    Compared over the common window, which must contain the origin of Z^2;
    agreement everywhere on it yields 0 with the agrees_on_window flag.
    """
    ax0, ay0, ax1, ay1 = x.bounds()
    bx0, by0, bx1, by1 = y.bounds()
    cx0, cy0 = max(ax0, bx0), max(ay0, by0)
    cx1, cy1 = min(ax1, bx1), min(ay1, by1)
    if cx0 > cx1 or cy0 > cy1 or not (cx0 <= 0 <= cx1 and cy0 <= 0 <= cy1):
        raise NoCommonWindowError("common window must exist and contain (0,0)")
    best: Optional[int] = None
    for py in range(cy0, cy1 + 1):
        for px in range(cx0, cx1 + 1):
            if x.get(px, py) != y.get(px, py):
                norm = max(abs(px), abs(py))
                if best is None or norm < best:
                    best = norm
                    if best == 0:
                        return ConfigDistance(Fraction(1), False)
    if best is None:
        return ConfigDistance(Fraction(0), True)
    return ConfigDistance(Fraction(1, 2 ** best), False)


# -- canonical JSON files ------------------------------------------------


def canonical_json(obj) -> str:
    """Byte-stable writer: sorted keys, no floats, newline-terminated."""
    _reject_floats(obj)
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _reject_floats(obj):
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in canonical files")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _reject_floats(k)
            _reject_floats(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _reject_floats(v)


def protoset_to_json(protoset: Protoset) -> str:
    return canonical_json(protoset.to_records())


def protoset_from_json(text: str, name: str = "") -> Protoset:
    return Protoset(json.loads(text), name=name)


def patch_to_json(patch: Patch, protoset_name: str = "",
                  protoset: Optional[Protoset] = None) -> str:
    doc = {
        "origin": list(patch.origin),
        "width": patch.width,
        "height": patch.height,
        "cells": list(patch.cells),
    }
    if protoset is not None:
        doc["protoset"] = protoset.to_records()
    elif protoset_name:
        doc["protoset_name"] = protoset_name
    return canonical_json(doc)


def patch_from_json(text: str) -> tuple[Patch, Optional[Protoset], str]:
    """Returns (patch, inline protoset or None, protoset name or "")."""
    doc = json.loads(text)
    patch = Patch(tuple(doc["origin"]), doc["width"], doc["height"], doc["cells"])
    inline = Protoset(doc["protoset"]) if "protoset" in doc else None
    return patch, inline, doc.get("protoset_name", "")
