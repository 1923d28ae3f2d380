"""Exact convex polygon primitives over Q(phi)^2.

Cells are strictly convex counter-clockwise polygons with golden
coordinates.  All predicates (orientation, containment, clipping) are
decided exactly; floats appear only in the reporting helpers.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .goldfield import Golden, GPoint

HALF = Fraction(1, 2)


class DegenerateCellError(ValueError):
    pass


def orient(p: GPoint, q: GPoint, r: GPoint) -> int:
    """Sign of the cross product (q-p) x (r-p): +1 left turn, -1 right."""
    return ((q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)).sign()


def area2(vertices: Sequence[GPoint]) -> Golden:
    """Twice the signed area (positive for counter-clockwise)."""
    total = Golden(0)
    n = len(vertices)
    for i in range(n):
        p, q = vertices[i], vertices[(i + 1) % n]
        total += p.x * q.y - q.x * p.y
    return total


class ConvexCell:
    """Strictly convex CCW polygon; vertices canonically rotated."""

    __slots__ = ("vertices", "_area", "_bbox")

    def __init__(self, vertices: Sequence[GPoint], validate: bool = True):
        verts = tuple(vertices)
        if validate:
            verts = _canonicalize(verts)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "_area", None)
        object.__setattr__(self, "_bbox", None)

    def __setattr__(self, *_):
        raise AttributeError("ConvexCell is immutable")

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        return isinstance(other, ConvexCell) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def area(self) -> Golden:
        if self._area is None:
            object.__setattr__(self, "_area", area2(self.vertices) * HALF)
        return self._area

    def bbox(self) -> tuple[Golden, Golden, Golden, Golden]:
        """(xmin, xmax, ymin, ymax), exact."""
        if self._bbox is None:
            xs = [v.x for v in self.vertices]
            ys = [v.y for v in self.vertices]
            object.__setattr__(
                self, "_bbox", (min(xs), max(xs), min(ys), max(ys)))
        return self._bbox

    def edges(self) -> Iterable[tuple[GPoint, GPoint]]:
        verts = self.vertices
        n = len(verts)
        for i in range(n):
            yield verts[i], verts[(i + 1) % n]

    def translate(self, d: GPoint) -> "ConvexCell":
        return ConvexCell(tuple(v + d for v in self.vertices), validate=False)

    def scale(self, c) -> "ConvexCell":
        cell = ConvexCell(tuple(v.scale(c) for v in self.vertices), validate=False)
        return cell if area2(cell.vertices).sign() > 0 else ConvexCell(
            tuple(reversed(cell.vertices)), validate=False)

    def contains(self, p: GPoint) -> int:
        """2 interior, 1 on boundary, 0 outside; exact."""
        on_edge = False
        for a, b in self.edges():
            s = orient(a, b, p)
            if s < 0:
                return 0
            if s == 0:
                on_edge = True
        return 1 if on_edge else 2

    def centroid(self) -> GPoint:
        """Vertex average: interior by strict convexity."""
        n = len(self.vertices)
        sx = Golden(0)
        sy = Golden(0)
        for v in self.vertices:
            sx += v.x
            sy += v.y
        inv = Fraction(1, n)
        return GPoint(sx * inv, sy * inv)

    def incident_edge_lines(self, p: GPoint) -> list[tuple[GPoint, GPoint]]:
        """Edges whose supporting line passes through p."""
        return [(a, b) for a, b in self.edges() if orient(a, b, p) == 0]

    def float_vertices(self) -> list[tuple[float, float]]:
        return [v.as_floats() for v in self.vertices]

    def __repr__(self):
        pts = ", ".join(f"({v.x},{v.y})" for v in self.vertices)
        return f"ConvexCell[{pts}]"


def _canonicalize(verts: tuple[GPoint, ...]) -> tuple[GPoint, ...]:
    if len(verts) < 3:
        raise DegenerateCellError("cell needs at least 3 vertices")
    if area2(verts).sign() < 0:
        verts = tuple(reversed(verts))
    n = len(verts)
    for i in range(n):
        if orient(verts[i], verts[(i + 1) % n], verts[(i + 2) % n]) <= 0:
            raise DegenerateCellError(
                "vertices must be strictly convex, no three collinear")
    # rotate so the lexicographically least vertex comes first
    least = min(range(n), key=lambda i: (verts[i].x, verts[i].y))
    return verts[least:] + verts[:least]


def clip_halfplane(verts: Sequence[GPoint], a: GPoint, b: GPoint) -> list[GPoint]:
    """Keep the closed side left of the directed line a->b (exact)."""
    out: list[GPoint] = []
    n = len(verts)
    if n == 0:
        return out
    prev = verts[-1]
    prev_side = orient(a, b, prev)
    for cur in verts:
        side = orient(a, b, cur)
        if side >= 0:
            if prev_side < 0:
                out.append(_line_intersect(a, b, prev, cur))
            out.append(cur)
        elif prev_side > 0:
            out.append(_line_intersect(a, b, prev, cur))
        prev, prev_side = cur, side
    return out


def _line_intersect(a: GPoint, b: GPoint, p: GPoint, q: GPoint) -> GPoint:
    """Intersection of line a-b with segment p-q (known to cross it)."""
    d1 = b - a
    d2 = q - p
    # p + t*d2 on line(a,b):  cross(d1, p - a) + t*cross(d1, d2) = 0
    t = -(d1.cross(p - a)) / d1.cross(d2)
    return GPoint(p.x + d2.x * t, p.y + d2.y * t)


def _dedupe(verts: list[GPoint]) -> list[GPoint]:
    out: list[GPoint] = []
    for v in verts:
        if not out or v != out[-1]:
            out.append(v)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _strip_collinear(verts: list[GPoint]) -> list[GPoint]:
    n = len(verts)
    if n < 3:
        return verts
    out = []
    for i in range(n):
        if orient(verts[(i - 1) % n], verts[i], verts[(i + 1) % n]) != 0:
            out.append(verts[i])
    return out


def intersect_cells(c1: ConvexCell, c2: ConvexCell) -> Optional[ConvexCell]:
    """Intersection with positive area, or None (lower-dimensional counts
    as empty, matching the open-atom reading)."""
    x1a, x1b, y1a, y1b = c1.bbox()
    x2a, x2b, y2a, y2b = c2.bbox()
    if x1b <= x2a or x2b <= x1a or y1b <= y2a or y2b <= y1a:
        return None
    verts: list[GPoint] = list(c1.vertices)
    for a, b in c2.edges():
        verts = clip_halfplane(verts, a, b)
        if len(verts) < 3:
            return None
    verts = _strip_collinear(_dedupe(verts))
    if len(verts) < 3 or area2(verts).sign() <= 0:
        return None
    return ConvexCell(verts)


Region = list  # list[ConvexCell]


def region_area(region: Region) -> Golden:
    total = Golden(0)
    for cell in region:
        total += cell.area()
    return total


def region_intersect(r1: Region, r2: Region) -> Region:
    out = []
    for a in r1:
        for b in r2:
            piece = intersect_cells(a, b)
            if piece is not None:
                out.append(piece)
    return out


def regions_equal_area(r1: Region, r2: Region) -> bool:
    """Equality as measurable sets: zero symmetric difference.

    Valid because cells within each region have disjoint interiors.
    """
    a1 = region_area(r1)
    a2 = region_area(r2)
    if a1 != a2:
        return False
    inter = region_area(region_intersect(r1, r2))
    return inter == a1


def _try_merge(c1: ConvexCell, c2: ConvexCell) -> Optional[ConvexCell]:
    """Union of two cells sharing a full edge, when the union is convex."""
    v1, v2 = list(c1.vertices), list(c2.vertices)
    n1, n2 = len(v1), len(v2)
    for i in range(n1):
        a, b = v1[i], v1[(i + 1) % n1]
        for j in range(n2):
            if v2[j] == b and v2[(j + 1) % n2] == a:
                merged = (
                    [v1[(i + 1 + k) % n1] for k in range(1, n1)]
                    + [v2[(j + 1 + k) % n2] for k in range(1, n2)]
                )
                loop = _strip_collinear(_dedupe(merged))
                if len(loop) < 3:
                    return None
                m = len(loop)
                for t in range(m):
                    if orient(loop[t], loop[(t + 1) % m],
                              loop[(t + 2) % m]) <= 0:
                        return None
                return ConvexCell(loop)
    return None


def simplify_region(region: Region) -> Region:
    """Greedy exact merging of edge-adjacent cells with convex unions.

    Keeps cell counts small across repeated refinement passes; the region
    covered is unchanged.
    """
    cells = list(region)
    changed = True
    while changed:
        changed = False
        out: list = []
        used = [False] * len(cells)
        for i in range(len(cells)):
            if used[i]:
                continue
            merged_cell = cells[i]
            for j in range(i + 1, len(cells)):
                if used[j]:
                    continue
                m = _try_merge(merged_cell, cells[j])
                if m is not None:
                    merged_cell = m
                    used[j] = True
                    changed = True
            out.append(merged_cell)
        cells = out
    return cells
