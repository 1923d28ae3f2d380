"""Exact polygonal torus partitions and their dynamical-consistency checks.

Atoms are unions of convex golden-coordinate cells inside one fundamental
domain (torus wrap may split a logical atom, so unions avoid non-convex
polygon algebra).  Wrap handling tests the 3x3 block of lattice translates
of each cell.  Intersections that are segments or points count as empty:
atoms are open sets.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .geometry import (
    ConvexCell,
    Region,
    intersect_cells,
    orient,
    region_area,
    region_intersect,
    regions_equal_area,
    simplify_region,
)
from .goldfield import Golden, GPoint, format_golden, parse_golden
from .torusdyn import Lattice2, TorusPoint, Window, window_points
from .wangcore import Protoset, canonical_json


class NotCoveredError(ValueError):
    """A torus point matched no atom closure: malformed partition."""


class UnknownLabelError(KeyError):
    pass


class LabelMismatchError(ValueError):
    pass


class InvariantViolationError(ValueError):
    pass


class Boundary(NamedTuple):
    """point_locate result on the partition boundary."""

    labels: tuple[int, ...]


class Atom:
    __slots__ = ("label", "cells")

    def __init__(self, label: int, cells: Sequence[ConvexCell]):
        if not cells:
            raise InvariantViolationError(f"atom {label} has no cells")
        object.__setattr__(self, "label", int(label))
        object.__setattr__(self, "cells", list(cells))

    def __setattr__(self, *_):
        raise AttributeError("Atom is immutable")

    def area(self) -> Golden:
        return region_area(self.cells)


def fundamental_cell(lattice: Lattice2) -> ConvexCell:
    z = GPoint(0, 0)
    return ConvexCell([z, lattice.g1, lattice.g1 + lattice.g2, lattice.g2])


def reduce_cell(cell: ConvexCell, lattice: Lattice2) -> Region:
    """Pieces of the cell reduced into the fundamental domain, exactly."""
    binv = lattice.basis_inv
    coeffs = [binv.mul_point(v) for v in cell.vertices]
    c1 = [c.x for c in coeffs]
    c2 = [c.y for c in coeffs]
    fd = fundamental_cell(lattice)
    out = []
    for i in range(min(c1).floor(), max(c1).floor() + 1):
        for j in range(min(c2).floor(), max(c2).floor() + 1):
            shifted = cell.translate(-lattice.vector(i, j))
            piece = intersect_cells(shifted, fd)
            if piece is not None:
                out.append(piece)
    return out


def reduce_region(region: Region, lattice: Lattice2,
                  shift: Optional[GPoint] = None) -> Region:
    out = []
    for cell in region:
        moved = cell if shift is None else cell.translate(shift)
        out.extend(reduce_cell(moved, lattice))
    return out


def region_shift_image(region: Region, lattice: Lattice2,
                       n: tuple[int, int]) -> Region:
    """Image of the region under the rotation R^n, reduced."""
    return reduce_region(region, lattice, GPoint(n[0], n[1]))


class BoundarySegment(NamedTuple):
    p: GPoint
    q: GPoint
    slope: Optional[Golden]  # None means vertical


class _Instance(NamedTuple):
    """One lattice translate of one atom cell, used for point location."""

    label: int
    cell: ConvexCell


class Partition:
    """Topological partition of R^2/Gamma into labeled polygonal atoms."""

    def __init__(self, lattice: Lattice2, atoms: Sequence[Atom],
                 validate: bool = True):
        self.lattice = lattice
        self.atoms = list(atoms)
        self._by_label = {a.label: a for a in self.atoms}
        if len(self._by_label) != len(self.atoms):
            raise InvariantViolationError("duplicate atom labels")
        self._instances: Optional[list[_Instance]] = None
        self._locator = None
        self._pieces = None
        self._segments = None
        if validate:
            self._validate()

    # -- invariants ------------------------------------------------------

    def _validate(self):
        total = Golden(0)
        cells = []
        binv = self.lattice.basis_inv
        for atom in self.atoms:
            for cell in atom.cells:
                for v in cell.vertices:
                    c = binv.mul_point(v)
                    if not (0 <= c.x <= 1 and 0 <= c.y <= 1):
                        raise InvariantViolationError(
                            f"atom {atom.label} leaves the fundamental domain")
                cells.append(cell)
                total += cell.area()
        if total != self.lattice.covolume():
            raise InvariantViolationError(
                f"atom areas sum to {total}, expected {self.lattice.covolume()}")
        for i in range(len(cells)):
            for j in range(i + 1, len(cells)):
                if intersect_cells(cells[i], cells[j]) is not None:
                    raise InvariantViolationError("atom interiors overlap")

    # -- lookup ------------------------------------------------------------

    def labels(self) -> list[int]:
        return [a.label for a in self.atoms]

    def atom(self, label: int) -> Atom:
        try:
            return self._by_label[label]
        except KeyError:
            raise UnknownLabelError(label) from None

    def atom_region(self, label: int) -> Region:
        return self.atom(label).cells

    def area(self, label: int) -> Golden:
        return self.atom(label).area()

    def instances(self) -> list[_Instance]:
        """Atom cells plus the lattice translates touching the domain."""
        if self._instances is None:
            fd = fundamental_cell(self.lattice)
            fxa, fxb, fya, fyb = fd.bbox()
            out = []
            for atom in self.atoms:
                for cell in atom.cells:
                    for i in (-1, 0, 1):
                        for j in (-1, 0, 1):
                            moved = cell.translate(self.lattice.vector(i, j))
                            xa, xb, ya, yb = moved.bbox()
                            if xb < fxa or xa > fxb or yb < fya or ya > fyb:
                                continue
                            out.append(_Instance(atom.label, moved))
            self._instances = out
        return self._instances

    def point_locate(self, tp: TorusPoint):
        """Atom label for interior points, Boundary(labels) on the boundary.

        Exact; wrap handled through lattice translates of the cells.
        """
        if tp.lattice != self.lattice:
            raise ValueError("torus point lives on a different lattice")
        x = tp.xy()
        labels = set()
        for label, cell in self.instances():
            xa, xb, ya, yb = cell.bbox()
            if not (xa <= x.x <= xb and ya <= x.y <= yb):
                continue
            c = cell.contains(x)
            if c == 2:
                return label
            if c == 1:
                labels.add(label)
        if not labels:
            raise NotCoveredError(f"point {x} not covered by any atom closure")
        if len(labels) == 1:
            return labels.pop()
        return Boundary(tuple(sorted(labels)))

    def locate_with_direction(self, tp: TorusPoint, v: GPoint) -> int:
        """Label of the atom entered from tp along direction v.

        For boundary points this resolves ambiguity by the exact cone test:
        the winning cell has every incident edge line on the correct side
        of v.  Interior points are unaffected by v.
        """
        loc = self.point_locate(tp)
        if not isinstance(loc, Boundary):
            return loc
        x = tp.xy()
        winners = set()
        for label, cell in self.instances():
            xa, xb, ya, yb = cell.bbox()
            if not (xa <= x.x <= xb and ya <= x.y <= yb):
                continue
            if cell.contains(x) == 0:
                continue
            ok = True
            for a, b in cell.incident_edge_lines(x):
                d = b - a
                if d.cross(v).sign() < 0:  # v points to the outside
                    ok = False
                    break
            if ok:
                winners.add(label)
        if len(winners) != 1:
            raise NotCoveredError(
                f"direction {v!r} does not resolve a unique atom at {x!r} "
                f"(candidates {sorted(winners)})")
        return winners.pop()

    # -- float prefilter for batch location --------------------------------

    def locator(self) -> "FloatLocator":
        if self._locator is None:
            self._locator = FloatLocator(self)
        return self._locator

    # -- boundary ---------------------------------------------------------

    def boundary_pieces(self):
        """Elementary boundary pieces with their adjacent atom labels.

        A piece survives only when two distinct atoms cover opposite
        sides, so interior cell-to-cell seams of one atom cancel exactly.
        """
        if self._pieces is None:
            self._pieces = _boundary_overlay(self)
        return self._pieces

    def boundary_segments(self) -> list[BoundarySegment]:
        """Maximal non-overlapping boundary segments, canonical order."""
        if self._segments is None:
            merged = []
            pieces = self.boundary_pieces()
            i = 0
            while i < len(pieces):
                key, t0, t1, p0, p1, _labels = pieces[i]
                j = i + 1
                while j < len(pieces) and pieces[j][0] == key and pieces[j][1] == t1:
                    t1 = pieces[j][2]
                    p1 = pieces[j][4]
                    j += 1
                merged.append(BoundarySegment(p0, p1, _key_slope(key)))
                i = j
            self._segments = merged
        return self._segments

    def boundary_contains(self, tp: TorusPoint) -> bool:
        return isinstance(self.point_locate(tp), Boundary)


class FloatLocator:
    """Vectorised location with a safety margin; exact fallback elsewhere.

    A point is claimed by a cell instance when it clears every edge by
    more than `margin` (unit-normalised float edge equations).  Points
    nothing claims are returned as -1 and must go through the exact path.
    """

    def __init__(self, partition: Partition, margin: float = 1e-9):
        self.partition = partition
        self.margin = margin
        rows_n = []
        rows_o = []
        bounds = []
        labels = []
        for label, cell in partition.instances():
            ns = []
            os_ = []
            for a, b in cell.edges():
                ax, ay = a.as_floats()
                bx, by = b.as_floats()
                nx, ny = -(by - ay), bx - ax
                norm = (nx * nx + ny * ny) ** 0.5
                nx, ny = nx / norm, ny / norm
                ns.append((nx, ny))
                os_.append(-(nx * ax + ny * ay))
            rows_n.append(np.array(ns))
            rows_o.append(np.array(os_))
            labels.append(label)
            xa, xb, ya, yb = cell.bbox()
            bounds.append((float(xa), float(xb), float(ya), float(yb)))
        self._normals = rows_n
        self._offsets = rows_o
        self._labels = np.array(labels, dtype=np.int64)
        self._bounds = np.array(bounds)

    def locate_batch(self, xy: np.ndarray) -> np.ndarray:
        """labels[i] >= 0 where confidently interior, else -1."""
        n = len(xy)
        best_val = np.full(n, -np.inf)
        best_label = np.full(n, -1, dtype=np.int64)
        x = xy[:, 0]
        y = xy[:, 1]
        pad = 1e-7
        for k in range(len(self._labels)):
            xa, xb, ya, yb = self._bounds[k]
            cand = np.nonzero(
                (x >= xa - pad) & (x <= xb + pad) & (y >= ya - pad) & (y <= yb + pad)
            )[0]
            if len(cand) == 0:
                continue
            normals = self._normals[k]
            vals = (
                xy[cand] @ normals.T + self._offsets[k][None, :]
            ).min(axis=1)
            better = vals > best_val[cand]
            idx = cand[better]
            best_val[idx] = vals[better]
            best_label[idx] = self._labels[k]
        best_label[best_val <= self.margin] = -1
        return best_label


# -- boundary overlay ------------------------------------------------------


def _line_key(p: GPoint, q: GPoint):
    """Canonical (a, b, c) for the line a*x + b*y = c with leading coeff 1."""
    a = q.y - p.y
    b = p.x - q.x
    c = a * p.x + b * p.y
    if not a.is_zero():
        inv = a.inverse()
        return (Golden(1), b * inv, c * inv)
    inv = b.inverse()
    return (Golden(0), Golden(1), c * inv)


def _key_direction(key) -> GPoint:
    a, b, _ = key
    if a.is_zero():
        return GPoint(Golden(1), Golden(0))
    return GPoint(-b, Golden(1))


def _key_slope(key) -> Optional[Golden]:
    a, b, _ = key
    if a.is_zero():
        return Golden(0)
    if b.is_zero():
        return None  # vertical
    return -b.inverse()


def _sort_token(g: Golden):
    return (g.a.numerator, g.a.denominator, g.b.numerator, g.b.denominator)


def _boundary_overlay(partition: Partition):
    lattice = partition.lattice
    binv = lattice.basis_inv
    half = Fraction(1, 2)
    lines: dict = {}
    for atom in partition.atoms:
        for cell in atom.cells:
            for p, q in cell.edges():
                mid = GPoint((p.x + q.x) * half, (p.y + q.y) * half)
                cm = binv.mul_point(mid)
                shift = lattice.vector(cm.x.floor(), cm.y.floor())
                p2, q2 = p - shift, q - shift
                key = _line_key(p2, q2)
                d = _key_direction(key)
                t0, t1 = p2.dot(d), q2.dot(d)
                ent = lines.setdefault(key, {"pts": {}, "pieces": []})
                ent["pts"][t0] = p2
                ent["pts"][t1] = q2
                if t1 < t0:
                    t0, t1 = t1, t0
                ent["pieces"].append((t0, t1, atom.label))
    out = []
    for key in sorted(lines, key=lambda k: tuple(_sort_token(g) for g in k)):
        ent = lines[key]
        ts = sorted(ent["pts"])
        for u, v in zip(ts, ts[1:]):
            covering = {
                lab for (t0, t1, lab) in ent["pieces"] if t0 <= u and t1 >= v
            }
            if len(covering) >= 2:
                out.append(
                    (key, u, v, ent["pts"][u], ent["pts"][v],
                     tuple(sorted(covering)))
                )
    return out


# -- invariance --------------------------------------------------------------


def invariance_set(partition: Partition, label: int, window: Window) -> set:
    """All n in the window with R^n(atom) = atom as exact regions.

    Fast path: if R^n of an interior probe point leaves the atom interior,
    n cannot fix the atom; the full symmetric-difference test runs only
    for survivors.
    """
    atom = partition.atom(label)
    region = atom.cells
    lattice = partition.lattice
    binv = lattice.basis_inv
    probe = atom.cells[0].centroid()
    base = binv.mul_point(probe)
    out = set()
    from .goldfield import mod1

    for n in window_points(window):
        shift = binv.mul_point(GPoint(n[0], n[1]))
        tp = TorusPoint(lattice, mod1(base.x + shift.x), mod1(base.y + shift.y))
        if partition.point_locate(tp) != label:
            continue
        image = region_shift_image(region, lattice, n)
        if regions_equal_area(image, region):
            out.add(n)
    return out


# -- side partitions and refinement ------------------------------------------


class SidePartition:
    """Coarse partition by one edge color; regions indexed by ColorId."""

    def __init__(self, lattice: Lattice2, color_regions: dict):
        self.lattice = lattice
        self.color_regions = dict(sorted(color_regions.items()))

    def colors(self) -> list[int]:
        return list(self.color_regions)

    def region(self, color: int) -> Region:
        return self.color_regions[color]

    def total_area(self) -> Golden:
        total = Golden(0)
        for region in self.color_regions.values():
            total += region_area(region)
        return total


def side_partitions_from(partition: Partition, protoset: Protoset
                         ) -> tuple[SidePartition, SidePartition]:
    """(right, bottom) side partitions: unions of atoms sharing the color."""
    if len(partition.atoms) != len(protoset):
        raise LabelMismatchError(
            f"{len(partition.atoms)} atoms vs {len(protoset)} tiles")
    right: dict = {}
    bottom: dict = {}
    for atom in partition.atoms:
        tile = protoset[atom.label]
        right.setdefault(tile.r, []).extend(atom.cells)
        bottom.setdefault(tile.b, []).extend(atom.cells)
    right = {c: simplify_region(reg) for c, reg in right.items()}
    bottom = {c: simplify_region(reg) for c, reg in bottom.items()}
    return (SidePartition(partition.lattice, right),
            SidePartition(partition.lattice, bottom))


def refine_side_partitions(p_right: SidePartition, p_bottom: SidePartition,
                           validate: bool = True
                           ) -> tuple[Partition, list[tuple[int, int, int, int]]]:
    """Common refinement of the four side partitions.

    The left side partition is the R^(1,0) image of the right one: the
    left color of the tile at n restates the right color of the tile at
    n-(1,0).  Dually the top side partition is the R^(0,-1) image of the
    bottom one: the top color at n restates the bottom color at n+(0,1).
    (The R^(0,+1) orientation bakes in the transposed vertical matching
    rule and demonstrably breaks the round trip.)  Each nonempty open
    intersection becomes one derived tile (r, t, l, b); empty-by-area
    intersections are discarded.
    """
    lattice = p_right.lattice
    p_left = {
        c: region_shift_image(reg, lattice, (1, 0))
        for c, reg in p_right.color_regions.items()
    }
    p_top = {
        c: region_shift_image(reg, lattice, (0, -1))
        for c, reg in p_bottom.color_regions.items()
    }
    tiles = []
    atoms = []
    for i, reg_r in p_right.color_regions.items():
        for j, reg_t in p_top.items():
            rt = region_intersect(reg_r, reg_t)
            if not rt:
                continue
            for k, reg_l in p_left.items():
                rtl = region_intersect(rt, reg_l)
                if not rtl:
                    continue
                for l, reg_b in p_bottom.color_regions.items():
                    cells = region_intersect(rtl, reg_b)
                    if cells:
                        atoms.append(Atom(len(tiles), cells))
                        tiles.append((i, j, k, l))
    return Partition(lattice, atoms, validate=validate), tiles


class ConsistencyReport(NamedTuple):
    ok: bool
    violations: list  # (axis, a, b): regions meet but colors clash
    unrealized: list  # (axis, a, b): colors match, regions never meet


def consistency_check(partition: Partition, protoset: Protoset
                      ) -> ConsistencyReport:
    """Local adjacency soundness of the partition against the protoset.

    Checks every ordered atom pair (a, b) in both axes: whenever the
    interiors of R^(1,0)(P_a) and P_b intersect, Right(T_a) must equal
    Left(T_b) (and vertically Top/Bottom).  That is the inclusion
    "encoded configurations are valid"; it fails loudly on any clash.

    Color-matching pairs whose regions never meet are reported in
    `unrealized` for information only: such adjacencies are locally legal
    yet never occur in the encoded system (for these protosets they are
    provably absent from all tilings, cf. the solver's UNSAT extension
    tests), so they cannot disqualify a partition.
    """
    if len(partition.atoms) != len(protoset):
        raise LabelMismatchError(
            f"{len(partition.atoms)} atoms vs {len(protoset)} tiles")
    lattice = partition.lattice
    violations = []
    unrealized = []
    for axis, step in (("horizontal", (1, 0)), ("vertical", (0, 1))):
        images = {
            a.label: region_shift_image(a.cells, lattice, step)
            for a in partition.atoms
        }
        for a in partition.atoms:
            ta = protoset[a.label]
            for b in partition.atoms:
                tb = protoset[b.label]
                overlaps = bool(region_intersect(images[a.label], b.cells))
                match = (ta.r == tb.l) if axis == "horizontal" else (ta.t == tb.b)
                if overlaps and not match:
                    violations.append((axis, a.label, b.label))
                elif match and not overlaps:
                    unrealized.append((axis, a.label, b.label))
    return ConsistencyReport(not violations, violations, unrealized)


def derive_wang_structure(partition: Partition) -> list[tuple[int, int, int, int]]:
    """Recover Wang tiles from the partition geometry alone.

    Horizontal and vertical adjacency relations are computed by exact
    region overlap; colors are the connected components of the bipartite
    out-side/in-side graph, i.e. only identifications forced by realized
    adjacencies are made.  This keeps every encoded configuration valid
    (overlap implies equal colors by construction) and may be finer than
    a hand-drawn coloring, since adjacencies that never occur in the
    system cannot force identifications.  Raises when some atom has no
    realized neighbour on one side.  Color ids are deterministic, ordered
    by the least atom label writing the color on its out side.
    """
    lattice = partition.lattice
    labels = partition.labels()
    colors = {}
    for axis, step in (("h", (1, 0)), ("v", (0, 1))):
        images = {
            a.label: region_shift_image(a.cells, lattice, step)
            for a in partition.atoms
        }
        parent: dict = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a in labels:
            parent[("out", a)] = ("out", a)
            parent[("in", a)] = ("in", a)
        realized_out = {a: False for a in labels}
        realized_in = {a: False for a in labels}
        for a in labels:
            for b in labels:
                if region_intersect(images[a], partition.atom_region(b)):
                    realized_out[a] = True
                    realized_in[b] = True
                    ra, rb = find(("out", a)), find(("in", b))
                    if ra != rb:
                        parent[ra] = rb
        if not all(realized_out.values()) or not all(realized_in.values()):
            raise InvariantViolationError(
                f"{axis}-adjacency leaves some atom without a neighbour")
        roots: dict = {}
        for a in labels:  # deterministic ids by least out-atom
            r = find(("out", a))
            if r not in roots:
                roots[r] = len(roots)
        out_color = {a: roots[find(("out", a))] for a in labels}
        in_color = {a: roots[find(("in", a))] for a in labels}
        colors[axis] = (out_color, in_color)
    right, left = colors["h"]
    top, bottom = colors["v"]
    return [(right[a], top[a], left[a], bottom[a]) for a in labels]


def snap_to_refinement(partition: Partition, protoset: Protoset,
                       max_rounds: int = 8) -> Partition:
    """Project an approximate partition onto its own refinement structure.

    A correct tile partition is the common refinement of its side
    partitions.  Iterating refine(side_partitions(P)) and absorbing any
    piece whose derived color tuple is not a protoset tile into the
    neighbouring real region with the longest shared edge contracts small
    labeling errors (residual slivers from inference) to the fixed point.
    Raises when no fixed point is reached.
    """
    real = {tuple(t): i for i, t in enumerate(protoset.tiles)}
    current = partition
    prev_signature = None
    for _ in range(max_rounds):
        p_right, p_bottom = side_partitions_from(current, protoset)
        refined, tuples = refine_side_partitions(p_right, p_bottom,
                                                 validate=False)
        cells = []
        owners = []  # protoset label or None for phantom pieces
        for tup, atom in zip(tuples, refined.atoms):
            label = real.get(tup)
            for cell in atom.cells:
                cells.append(cell)
                owners.append(label)
        if None in owners:
            shared = _shared_edge_overlaps(cells)
            neighbours: dict = {}
            for (a, b), ln in shared.items():
                neighbours.setdefault(a, []).append((ln, b))
                neighbours.setdefault(b, []).append((ln, a))
            pending = [i for i, o in enumerate(owners) if o is None]
            while pending:
                rest = []
                progressed = False
                for i in pending:
                    options = [
                        (ln, j) for ln, j in neighbours.get(i, [])
                        if owners[j] is not None
                    ]
                    if options:
                        options.sort(key=lambda o: (-o[0], o[1]))
                        owners[i] = owners[options[0][1]]
                        progressed = True
                    else:
                        rest.append(i)
                pending = rest
                if not progressed:
                    raise InvariantViolationError(
                        "refinement snap: isolated phantom piece")
        regions: dict = {}
        for cell, label in zip(cells, owners):
            regions.setdefault(label, []).append(cell)
        if len(regions) != len(protoset):
            raise InvariantViolationError(
                f"refinement snap lost atoms: {sorted(regions)}")
        regions = {lab: simplify_region(reg) for lab, reg in regions.items()}
        had_phantoms = any(real.get(t) is None for t in tuples)
        signature = tuple(region_area(regions[lab]) for lab in sorted(regions))
        if not had_phantoms and signature == prev_signature:
            return Partition(current.lattice,
                             [Atom(lab, regions[lab]) for lab in sorted(regions)])
        prev_signature = signature
        current = Partition(current.lattice,
                            [Atom(lab, regions[lab]) for lab in sorted(regions)],
                            validate=False)
    raise InvariantViolationError("refinement snap did not converge")


def _shared_edge_overlaps(cells):
    """cell-pair -> shared edge length (float), exact collinearity."""
    by_line: dict = {}
    for ci, cell in enumerate(cells):
        for p, q in cell.edges():
            key = _line_key(p, q)
            d = _key_direction(key)
            t0, t1 = float(p.dot(d)), float(q.dot(d))
            if t1 < t0:
                t0, t1 = t1, t0
            by_line.setdefault(key, []).append((t0, t1, ci))
    shared: dict = {}
    for pieces in by_line.values():
        for i in range(len(pieces)):
            a0, a1, ca = pieces[i]
            for j in range(i + 1, len(pieces)):
                b0, b1, cb = pieces[j]
                if ca == cb:
                    continue
                ov = min(a1, b1) - max(a0, b0)
                if ov > 1e-12:
                    pair = (ca, cb) if ca < cb else (cb, ca)
                    shared[pair] = shared.get(pair, 0.0) + ov
    return shared


def _partitions_equal(p1: Partition, p2: Partition) -> bool:
    if sorted(p1.labels()) != sorted(p2.labels()):
        return False
    return all(
        regions_equal_area(p1.atom_region(lab), p2.atom_region(lab))
        for lab in p1.labels()
    )


def merge_atoms_across_slope(partition: Partition, slope: Optional[Golden]
                             ) -> Partition:
    """Erase every boundary segment of the given slope by fusing the atoms
    on its two sides; remaining atoms are relabeled 0..k-1 by their least
    original label.  (None = vertical lines.)"""
    parent = {a.label: a.label for a in partition.atoms}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for key, _u, _v, _p, _q, labels in partition.boundary_pieces():
        if _key_slope(key) == slope or (
                slope is None and _key_slope(key) is None):
            roots = sorted({find(l) for l in labels})
            for r in roots[1:]:
                parent[r] = roots[0]
    groups: dict = {}
    for atom in partition.atoms:
        groups.setdefault(find(atom.label), []).extend(atom.cells)
    atoms = [
        Atom(new, cells)
        for new, (_, cells) in enumerate(sorted(groups.items()))
    ]
    return Partition(partition.lattice, atoms)


# -- file format -------------------------------------------------------------


def _point_doc(p: GPoint) -> list[str]:
    return [format_golden(p.x), format_golden(p.y)]


def partition_to_json(partition: Partition) -> str:
    doc = {
        "lattice": [
            f"{format_golden(partition.lattice.g1.x)},{format_golden(partition.lattice.g1.y)}",
            f"{format_golden(partition.lattice.g2.x)},{format_golden(partition.lattice.g2.y)}",
        ],
        "atoms": [
            {
                "label": atom.label,
                "cells": sorted(
                    ([_point_doc(v) for v in cell.vertices] for cell in atom.cells),
                ),
            }
            for atom in sorted(partition.atoms, key=lambda a: a.label)
        ],
    }
    return canonical_json(doc)


def partition_from_json(text: str) -> Partition:
    try:
        doc = json.loads(text)
        g1_t, g2_t = doc["lattice"]
        g1x, g1y = g1_t.split(",")
        g2x, g2y = g2_t.split(",")
        lattice = Lattice2(
            GPoint(parse_golden(g1x), parse_golden(g1y)),
            GPoint(parse_golden(g2x), parse_golden(g2y)),
        )
        atoms = []
        for atom_doc in doc["atoms"]:
            cells = [
                ConvexCell([GPoint(parse_golden(x), parse_golden(y)) for x, y in cell])
                for cell in atom_doc["cells"]
            ]
            atoms.append(Atom(int(atom_doc["label"]), cells))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvariantViolationError):
            raise
        raise InvariantViolationError(f"bad partition file: {exc}") from exc
    return Partition(lattice, atoms)
