"""Experimental pipeline: pull tilings back to dot patterns, score them,
search lattices, detect Fibonacci signatures, infer exact partitions and
compare tile frequencies with atom areas.

Dot positions are computed exactly in coefficient coordinates and emitted
as floats for scoring and plotting; inference snaps boundary lines to the
half-integer golden grid, so the output partition is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .geometry import ConvexCell, area2, clip_halfplane
from .goldfield import Golden, GMatrix2, GPoint, PHI, mod1
from .partition import Atom, Partition, fundamental_cell
from .torusdyn import Lattice2
from .wangcore import Patch, Protoset

FIBONACCI = (1, 2, 3, 5, 8, 13, 21, 34, 55, 89)


class TooFewDotsError(ValueError):
    pass


class UnresolvableError(ValueError):
    """No consistent line arrangement explains the dot pattern."""


@dataclass
class DotPattern:
    """Labeled pull-back dots in coefficient coordinates.

    positions are floats in [0,1)^2 for scoring; coeffs keeps the exact
    golden values for snapping and exactness checks.  provenance records
    the source patch and pull-back matrix.
    """

    positions: np.ndarray  # (N, 2) float
    labels: np.ndarray  # (N,) int
    coeffs: list  # list of (Golden, Golden)
    matrix: GMatrix2
    source: str = ""

    def __len__(self):
        return len(self.labels)


def pullback_dots(patch: Patch, matrix: GMatrix2, source: str = "") -> DotPattern:
    """One dot per cell: fractional parts of A^-1 n, colored by tile label.

    Exact incremental evaluation; floats are derived from the exact values.
    """
    ainv = matrix.inverse()
    if not patch.is_fully_assigned():
        raise ValueError("patch must be fully assigned")
    ox, oy = patch.origin
    step_x = ainv.mul_point(GPoint(1, 0))
    step_y = ainv.mul_point(GPoint(0, 1))
    base = ainv.mul_point(GPoint(ox, oy))
    coeffs = []
    labels = np.empty(patch.width * patch.height, dtype=np.int64)
    k = 0
    row1, row2 = base.x, base.y
    for j in range(patch.height):
        c1, c2 = row1, row2
        for i in range(patch.width):
            coeffs.append((mod1(c1), mod1(c2)))
            labels[k] = patch.cells[k]
            k += 1
            c1 += step_x.x
            c2 += step_x.y
        row1 += step_y.x
        row2 += step_y.y
    positions = np.array([(float(a), float(b)) for a, b in coeffs])
    return DotPattern(positions, labels, coeffs, matrix, source)


def resolvedness_score(dots: DotPattern, k: int = 8) -> float:
    """Mean fraction of the k nearest neighbours sharing the dot's label.

    Torus metric on the unit square; ties break deterministically by dot
    index.  1.0 means perfectly resolved clusters.
    """
    n = len(dots)
    if n < k + 1:
        raise TooFewDotsError(f"need at least {k + 1} dots, got {n}")
    pos = dots.positions
    labels = dots.labels
    same = 0
    chunk = max(1, 2**22 // n)
    idx = np.arange(n)
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        d = np.abs(pos[lo:hi, None, :] - pos[None, :, :])
        d = np.minimum(d, 1.0 - d)
        dist2 = (d * d).sum(axis=2)
        dist2[np.arange(hi - lo), np.arange(lo, hi)] = np.inf
        order = np.lexsort((np.broadcast_to(idx, dist2.shape), dist2), axis=1)
        nearest = order[:, :k]
        same += (labels[nearest] == labels[lo:hi, None]).sum()
    return float(same) / (n * k)


class LatticeCandidate(NamedTuple):
    params: tuple[int, int, int, int, int]
    lattice: Lattice2
    score: float


DEFAULT_GRID = ((-1, 0, 1), (0, 1, 2), (0, 1, 2), (0, 1, 2), (0, 1, 2, 3))


def lattice_search(patch: Patch, grid: Optional[Sequence] = None,
                   top: Optional[int] = None, k: int = 8) -> list[LatticeCandidate]:
    """Rank candidate lattices (phi+P0, 0), (P1 phi+P2, P3 phi+P4) by the
    resolvedness of the pulled-back dot pattern; singular ones skipped."""
    grid = DEFAULT_GRID if grid is None else grid
    results = []
    for p0, p1, p2, p3, p4 in itertools.product(*grid):
        g1 = GPoint(PHI + p0, Golden(0))
        g2 = GPoint(p1 * PHI + p2, p3 * PHI + p4)
        m = GMatrix2.from_columns(g1, g2)
        if m.det().is_zero():
            continue
        dots = pullback_dots(patch, m)
        score = resolvedness_score(dots, k=k)
        results.append(LatticeCandidate((p0, p1, p2, p3, p4),
                                        Lattice2(g1, g2), score))
    results.sort(key=lambda c: (-c.score, c.params))
    return results[:top] if top else results


class LineRecurrence(NamedTuple):
    index: int
    distances: tuple[int, ...]
    minimal: Optional[int]
    minimal_is_fibonacci: Optional[bool]


class SignatureReport(NamedTuple):
    lines: list  # LineRecurrence per row/column
    fibonacci_fraction: float


class WindowTooSmallError(ValueError):
    pass


def fib_signature(patch: Patch, axis: str = "rows",
                  motif_len: int = 8) -> SignatureReport:
    """Self-agreement distances of each row (or column) of the patch.

    Distance d qualifies when the line agrees with its d-shift on at
    least motif_len consecutive cells.  The summary fraction counts lines
    whose minimal qualifying distance is a Fibonacci number.
    """
    grid = np.array(patch.cells, dtype=np.int64).reshape(patch.height, patch.width)
    lines = grid if axis == "rows" else grid.T
    length = lines.shape[1]
    if length < 2 * motif_len:
        raise WindowTooSmallError(
            f"need window length >= {2 * motif_len}, got {length}")
    out = []
    fib_hits = 0
    counted = 0
    for idx, line in enumerate(lines):
        found = []
        for d in range(1, length - motif_len + 1):
            eq = line[:length - d] == line[d:]
            best = run = 0
            for v in eq:
                run = run + 1 if v else 0
                best = max(best, run)
            if best >= motif_len:
                found.append(d)
        minimal = found[0] if found else None
        is_fib = (minimal in FIBONACCI) if minimal is not None else None
        if minimal is not None:
            counted += 1
            fib_hits += bool(is_fib)
        out.append(LineRecurrence(idx, tuple(found), minimal, is_fib))
    fraction = fib_hits / counted if counted else 0.0
    return SignatureReport(out, fraction)


# -- partition inference -----------------------------------------------------


class CandidateLine(NamedTuple):
    slope: Optional[Golden]  # None = vertical
    intercept: Golden  # y-intercept, or x position for verticals

    def anchor_points(self) -> tuple[GPoint, GPoint]:
        if self.slope is None:
            return (GPoint(self.intercept, Golden(0)),
                    GPoint(self.intercept, Golden(1)))
        p = GPoint(Golden(0), self.intercept)
        return (p, GPoint(Golden(1), self.intercept + self.slope))


def _half_grid(bound: int, denominator: int = 2):
    steps = [Fraction(i, denominator)
             for i in range(-denominator * bound, denominator * bound + 1)]
    for u in steps:
        for v in steps:
            yield Golden(u) + Golden(0, 1) * v


def _crosses_domain(line: CandidateLine, fd) -> bool:
    a, b = line.anchor_points()
    signs = {(b - a).cross(v - a).sign() for v in fd.vertices}
    return 1 in signs and -1 in signs


def candidate_lines(slopes: Sequence[Optional[Golden]], lattice: Lattice2,
                    snap_bound: int,
                    anchors: Optional[dict] = None) -> list[CandidateLine]:
    """Golden grid of candidate lines meeting the fundamental domain.

    Intercepts are half-integer golden combinations relative to the
    per-slope anchor (default zero).  An anchor shifts the whole family:
    intercept differences inside one family are frame-independent, so a
    non-grid orbit phase in the source data only moves the anchor.
    """
    fd = fundamental_cell(lattice)
    out = []
    for slope in slopes:
        anchor = Golden(0)
        if anchors:
            anchor = anchors.get(_slope_key(slope), Golden(0))
        for c in _half_grid(snap_bound):
            line = CandidateLine(slope, anchor + c)
            if _crosses_domain(line, fd):
                out.append(line)
    return out


def _slope_key(slope: Optional[Golden]):
    return None if slope is None else (slope.a, slope.b)


def _line_floats(line: CandidateLine):
    """(nx, ny, c) with unit normal: signed distance = nx*x + ny*y - c."""
    if line.slope is None:
        return 1.0, 0.0, float(line.intercept)
    s = float(line.slope)
    norm = math.hypot(s, 1.0)
    return -s / norm, 1.0 / norm, float(line.intercept) / norm


def _separating_chunk_count(nx, ny, c, xy, labels, spacing) -> int:
    """Chunks along the line where the two sides' majorities differ."""
    dist = xy[:, 0] * nx + xy[:, 1] * ny - c
    band = np.abs(dist) <= 1.6 * spacing
    if band.sum() < 8:
        return 0
    t = xy[band, 0] * ny - xy[band, 1] * nx
    side = dist[band] > 0
    lab = labels[band]
    order = np.argsort(t, kind="stable")
    t, side, lab = t[order], side[order], lab[order]
    chunk_len = 4.0 * spacing
    sep = 0
    lo = 0
    while lo < len(t):
        hi = lo
        while hi < len(t) and t[hi] <= t[lo] + chunk_len:
            hi += 1
        plus = lab[lo:hi][side[lo:hi]]
        minus = lab[lo:hi][~side[lo:hi]]
        if len(plus) >= 2 and len(minus) >= 2:
            if np.bincount(plus).argmax() != np.bincount(minus).argmax():
                sep += 1
        lo = hi
    return sep


def _golden_approximant(value: float, tol: float, bound: int = 16,
                        denominator: int = 4) -> Optional[Golden]:
    """Lowest-complexity u + v*phi (quarter-integer u, v) within tol."""
    best = None
    phi = _PHI_F
    for u4 in range(-denominator * bound, denominator * bound + 1):
        u = u4 / denominator
        rem = value - u
        v4 = round(rem / phi * denominator)
        if abs(v4) > denominator * bound:
            continue
        err = abs(u + (v4 / denominator) * phi - value)
        complexity = abs(u4) + abs(v4)
        if err <= tol and (best is None or (err, complexity) < best[:2]):
            best = (err, complexity,
                    Golden(Fraction(u4, denominator)) +
                    Golden(0, Fraction(v4, denominator)))
    return None if best is None else best[2]


_PHI_F = (1 + 5 ** 0.5) / 2


def _measure_family(slope: Optional[Golden], xy, labels, spacing, lattice):
    """Local maxima of separation evidence over the intercept sweep.

    Returns (maxima list of (intercept, score), tolerance) with intercepts
    in line units (y-intercept, or x for verticals).
    """
    fd = fundamental_cell(lattice)
    corners = [v.as_floats() for v in fd.vertices]
    if slope is None:
        nx, ny, scale = 1.0, 0.0, 1.0
        cs = [x for x, _ in corners]
    else:
        s = float(slope)
        norm = math.hypot(s, 1.0)
        nx, ny, scale = -s / norm, 1.0 / norm, 1.0 / norm
        cs = [y - s * x for x, y in corners]
    lo, hi = min(cs), max(cs)
    step = 0.2 * spacing / scale
    grid = np.arange(lo + step, hi - step, step)
    scores = np.array([
        _separating_chunk_count(nx, ny, c * scale, xy, labels, spacing)
        for c in grid
    ])
    maxima = []
    window = max(1, int(round(spacing / scale / step)))
    for i in range(len(grid)):
        s_i = scores[i]
        if s_i < 2:
            continue
        lo_i, hi_i = max(0, i - window), min(len(grid), i + window + 1)
        if s_i == scores[lo_i:hi_i].max() and (i == 0 or scores[i - 1] < s_i):
            maxima.append((float(grid[i]), int(s_i)))
    tol = 0.45 * spacing / scale
    return maxima, tol


def estimate_anchors(slopes: Sequence[Optional[Golden]], xy: np.ndarray,
                     labels: np.ndarray, spacing: float,
                     lattice: Lattice2) -> dict:
    """Exact per-slope anchor intercepts aligning the grid to the data.

    The source patch's orbit phase is a single plane translation
    (tau_x, tau_y), so family offsets are coherent: a slope-s family is
    offset by tau_y - s*tau_x and verticals by tau_x.  Two measured
    families determine tau exactly (slope differences here are units of
    Z[phi], so the derived anchors stay on the half-integer grid); the
    candidate pair with the best coverage of all measured lines wins.
    """
    measured = {}
    tols = {}
    for slope in slopes:
        maxima, tol = _measure_family(slope, xy, labels, spacing, lattice)
        if maxima:
            measured[_slope_key(slope)] = (slope, maxima)
            tols[_slope_key(slope)] = tol
    if not measured:
        return {}
    ranked = sorted(
        measured.values(),
        key=lambda sm: -sum(score for _, score in sm[1]),
    )
    if len(ranked) == 1:
        slope, maxima = ranked[0]
        best = max(maxima, key=lambda m: m[1])
        exact = _golden_approximant(best[0], tols[_slope_key(slope)])
        return {} if exact is None else {_slope_key(slope): exact}

    (s1, max1), (s2, max2) = ranked[0], ranked[1]
    k1, k2 = _slope_key(s1), _slope_key(s2)
    cand1 = _anchor_candidates(max1, tols[k1])
    cand2 = _anchor_candidates(max2, tols[k2])
    best = None
    for a1 in cand1:
        for a2 in cand2:
            tau = _tau_from_anchors(s1, a1, s2, a2)
            if tau is None:
                continue
            tau_x, tau_y = tau
            anchors = {}
            for slope in slopes:
                if slope is None:
                    anchors[None] = tau_x
                else:
                    anchors[_slope_key(slope)] = tau_y - slope * tau_x
            cover = 0.0
            for key, (slope, maxima) in measured.items():
                anchor_f = float(anchors[key])
                for c, score in maxima:
                    delta = c - anchor_f
                    snapped = _golden_approximant(delta, tols[key], bound=14,
                                                  denominator=2)
                    if snapped is not None:
                        cover += score
            if best is None or cover > best[0]:
                best = (cover, anchors)
    return best[1] if best else {}


def _anchor_candidates(maxima, tol, top: int = 3):
    strongest = max(maxima, key=lambda m: m[1])[0]
    out = []
    for denominator in (2, 4):
        g = _golden_approximant(strongest, tol, denominator=denominator)
        if g is not None and g not in out:
            out.append(g)
        if len(out) >= top:
            break
    return out


def _tau_from_anchors(s1: Optional[Golden], a1: Golden,
                      s2: Optional[Golden], a2: Golden):
    """(tau_x, tau_y) from two family anchors; None when degenerate."""
    if s1 is None and s2 is None:
        return None
    if s1 is None:
        tau_x = a1
        tau_y = a2 + s2 * tau_x
        return tau_x, tau_y
    if s2 is None:
        tau_x = a2
        tau_y = a1 + s1 * tau_x
        return tau_x, tau_y
    diff = s2 - s1
    if diff.is_zero():
        return None
    tau_x = (a1 - a2) / diff
    tau_y = a1 + s1 * tau_x
    return tau_x, tau_y


def _line_separates(line: CandidateLine, xy: np.ndarray, labels: np.ndarray,
                    spacing: float, min_chunks: int = 2,
                    frac_needed: float = 0.6) -> bool:
    """Strong evidence that the line is a label boundary along its length.

    Thin slivers with sparse evidence are recovered later by the cell
    repair stage, so this stage can stay strict and keep the arrangement
    small.
    """
    nx, ny, c = _line_floats(line)
    dist = xy[:, 0] * nx + xy[:, 1] * ny - c
    band = np.abs(dist) <= 1.6 * spacing
    if band.sum() < 8:
        return False
    t = xy[band, 0] * ny - xy[band, 1] * nx
    side = dist[band] > 0
    lab = labels[band]
    order = np.argsort(t, kind="stable")
    t, side, lab = t[order], side[order], lab[order]
    chunk_len = 4.0 * spacing
    sep = evaluated = 0
    lo = 0
    while lo < len(t):
        hi = lo
        while hi < len(t) and t[hi] <= t[lo] + chunk_len:
            hi += 1
        plus = lab[lo:hi][side[lo:hi]]
        minus = lab[lo:hi][~side[lo:hi]]
        if len(plus) >= 2 and len(minus) >= 2:
            evaluated += 1
            if np.bincount(plus).argmax() != np.bincount(minus).argmax():
                sep += 1
        lo = hi
    if evaluated == 0:
        return False
    return sep >= min_chunks and sep / evaluated >= frac_needed


def _split_cells(cells: list, line: CandidateLine) -> list:
    a, b = line.anchor_points()
    out = []
    for cell in cells:
        left = clip_halfplane(list(cell.vertices), a, b)
        right = clip_halfplane(list(cell.vertices), b, a)
        done = False
        for verts in (left, right):
            verts = _clean(verts)
            if len(verts) >= 3 and area2(verts).sign() > 0:
                out.append(ConvexCell(verts))
                done = True
        if not done:
            out.append(cell)
    return out


def _clean(verts):
    from .geometry import _dedupe, _strip_collinear

    return _strip_collinear(_dedupe(list(verts)))


def _chunked_split_cost(line: CandidateLine, xy: np.ndarray, labels: np.ndarray,
                        band_idx: np.ndarray, spacing: float) -> int:
    """Dots voting against their side's local majority if split by the line."""
    nx, ny, c = _line_floats(line)
    t = xy[band_idx, 0] * ny - xy[band_idx, 1] * nx
    side = (xy[band_idx, 0] * nx + xy[band_idx, 1] * ny - c) > 0
    lab = labels[band_idx]
    order = np.argsort(t, kind="stable")
    t, side, lab = t[order], side[order], lab[order]
    chunk_len = 4.0 * spacing
    cost = 0
    lo = 0
    while lo < len(t):
        hi = lo
        while hi < len(t) and t[hi] <= t[lo] + chunk_len:
            hi += 1
        for sgn in (True, False):
            part = lab[lo:hi][side[lo:hi] == sgn]
            cost += _minority_count(part)
        lo = hi
    return cost


def _prune_close_parallels(lines: list, xy: np.ndarray, labels: np.ndarray,
                           spacing: float) -> list:
    """Among near-coincident parallel candidates keep the better purifier.

    Close parallel duplicates are the main source of thin dot-free sliver
    cells, which majority voting cannot label reliably.
    """
    by_slope: dict = {}
    for line in lines:
        key = None if line.slope is None else (line.slope.a, line.slope.b)
        by_slope.setdefault(key, []).append(line)
    kept = []
    for group in by_slope.values():
        group = sorted(group, key=lambda l: float(l.intercept))
        dead = [False] * len(group)
        for i in range(len(group)):
            if dead[i]:
                continue
            for j in range(i + 1, len(group)):
                if dead[j]:
                    continue
                gap = (abs(float(group[j].intercept) - float(group[i].intercept))
                       * _normal_scale(group[i]))
                if gap >= 2.0 * spacing:
                    break
                a, b = group[i], group[j]
                na = _line_floats(a)
                nb = _line_floats(b)
                da = xy[:, 0] * na[0] + xy[:, 1] * na[1] - na[2]
                db = xy[:, 0] * nb[0] + xy[:, 1] * nb[1] - nb[2]
                band = np.nonzero((np.abs(da) <= 1.6 * spacing)
                                  | (np.abs(db) <= 1.6 * spacing))[0]
                cost_a = _chunked_split_cost(a, xy, labels, band, spacing)
                cost_b = _chunked_split_cost(b, xy, labels, band, spacing)
                if cost_b < cost_a:
                    dead[i] = True
                    break
                dead[j] = True
        kept.extend(l for k, l in enumerate(group) if not dead[k])
    return kept


def _normal_scale(line: CandidateLine) -> float:
    """Intercept difference to perpendicular distance conversion factor."""
    if line.slope is None:
        return 1.0
    return 1.0 / math.hypot(float(line.slope), 1.0)


def _cell_dots(cell: ConvexCell, xy: np.ndarray, margin: float = 1e-9) -> np.ndarray:
    """Indices of dots strictly inside the cell (float test)."""
    verts = np.array(cell.float_vertices())
    xa, ya = verts.min(axis=0)
    xb, yb = verts.max(axis=0)
    cand = np.nonzero((xy[:, 0] >= xa - margin) & (xy[:, 0] <= xb + margin)
                      & (xy[:, 1] >= ya - margin) & (xy[:, 1] <= yb + margin))[0]
    if not len(cand):
        return cand
    inside = np.ones(len(cand), dtype=bool)
    n = len(verts)
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        val = (xy[cand, 0] - ax) * (by - ay) - (xy[cand, 1] - ay) * (bx - ax)
        inside &= val <= -margin  # strictly left of each CCW edge
    return cand[inside]


def _minority_count(lab: np.ndarray) -> int:
    if len(lab) == 0:
        return 0
    return len(lab) - int(np.bincount(lab).max())


def _repair_impure_cells(cells: list, xy: np.ndarray, labels: np.ndarray,
                         all_lines: list, max_rounds: int = 6
                         ) -> tuple[list, list]:
    """Split cells whose dots disagree, using the line that purifies them.

    Handles thin slivers whose global evidence was too sparse for the
    strict acceptance stage.  A split is taken only when it strictly
    reduces the cell's minority count, so the loop terminates.  Returns
    (cells, lines used) so callers can reconcile the used lines with the
    globally accepted set.
    """
    used = []
    for _ in range(max_rounds):
        changed = False
        out = []
        for cell in cells:
            idx = _cell_dots(cell, xy)
            lab = labels[idx]
            minority = _minority_count(lab)
            if minority < 2 or minority < 0.05 * len(lab):
                out.append(cell)
                continue
            best = None
            for line in all_lines:
                nx, ny, c = _line_floats(line)
                dist = xy[idx, 0] * nx + xy[idx, 1] * ny - c
                plus = lab[dist > 0]
                minus = lab[dist <= 0]
                if not len(plus) or not len(minus):
                    continue
                after = _minority_count(plus) + _minority_count(minus)
                if after < minority and (best is None or after < best[0]):
                    best = (after, line)
            if best is None:
                out.append(cell)
                continue
            pieces = _split_cells([cell], best[1])
            if len(pieces) == 1:
                out.append(cell)
                continue
            used.append(best[1])
            out.extend(pieces)
            changed = True
        cells = out
        if not changed:
            break
    return cells, used


def infer_partition(dots: DotPattern, slopes: Sequence[Optional[Golden]],
                    snap_bound: int = 4, max_misclass: float = 0.005,
                    lattice: Optional[Lattice2] = None,
                    align_frame: bool = True) -> Partition:
    """Exact partition whose atoms explain the dot pattern.

    Per-slope anchors absorb the source patch's orbit phase; stage 1
    builds the arrangement of grid-snapped lines with strong global
    separation evidence; stage 2 repairs remaining impure cells with
    targeted splits from the full candidate list.  Cells take their
    majority dot label, same-label cells merge into atoms, and the result
    must misclassify at most `max_misclass` of the dots.
    """
    if lattice is None:
        lattice = Lattice2(dots.matrix.column(0), dots.matrix.column(1))
    # dots in fundamental-domain (plane) coordinates
    g1x, g1y = lattice.g1.as_floats()
    g2x, g2y = lattice.g2.as_floats()
    c = dots.positions
    xy = np.empty_like(c)
    xy[:, 0] = c[:, 0] * g1x + c[:, 1] * g2x
    xy[:, 1] = c[:, 0] * g1y + c[:, 1] * g2y
    labels = dots.labels.astype(np.int64)
    spacing = math.sqrt(abs(float(lattice.det())) / len(dots))

    anchors = (estimate_anchors(slopes, xy, labels, spacing, lattice)
               if align_frame else None)
    all_lines = candidate_lines(slopes, lattice, snap_bound, anchors)
    accepted = [
        line for line in all_lines
        if _line_separates(line, xy, labels, spacing)
    ]
    lines = _prune_close_parallels(accepted, xy, labels, spacing)
    cells: list = []
    cell_labels: list = []
    for _ in range(6):
        cells = [fundamental_cell(lattice)]
        for line in lines:
            cells = _split_cells(cells, line)
        cells, used = _repair_impure_cells(cells, xy, labels, all_lines)
        if used:
            # a repair line close and parallel to an accepted one is a
            # twin: keep the better purifier and rebuild
            lines = _prune_close_parallels(lines + used, xy, labels, spacing)
            cells = [fundamental_cell(lattice)]
            for line in lines:
                cells = _split_cells(cells, line)
            cells, _ = _repair_impure_cells(cells, xy, labels, all_lines)
        cell_labels, _ = _label_cells(cells, xy, labels)
        dot_bearing = [len(_cell_dots(c, xy)) > 0 for c in cells]
        surviving = _load_bearing_lines(lines, cells, cell_labels, dot_bearing)
        if {(l.slope, l.intercept) for l in surviving} == \
                {(l.slope, l.intercept) for l in lines}:
            break
        lines = surviving

    # boundary-hit stage: orbits whose phase touches the boundary drop
    # dots exactly onto partition lines; such dots disagree with their
    # cell's majority but share exact intercepts.  A line through them is
    # exact, and once it joins the arrangement those dots sit on cell
    # edges and stop voting.
    for _ in range(3):
        cell_labels, misclassified = _label_cells(cells, xy, labels)
        if misclassified <= max_misclass * len(dots):
            break
        new_lines = _boundary_dot_lines(
            dots, slopes, lattice, cells, cell_labels, xy, labels)
        if not new_lines:
            break
        for line in new_lines:
            cells = _split_cells(cells, line)

    cell_labels, misclassified = _label_cells(cells, xy, labels)
    if misclassified > max_misclass * len(dots):
        raise UnresolvableError(
            f"{misclassified}/{len(dots)} dots misclassified by the "
            f"accepted arrangement ({len(accepted)} lines)")
    atoms_cells: dict = {}
    for cell, lab in zip(cells, cell_labels):
        atoms_cells.setdefault(int(lab), []).append(cell)
    atoms = [Atom(lab, cls) for lab, cls in sorted(atoms_cells.items())]
    return Partition(lattice, atoms)


def _edges_by_line(cells):
    """line key -> list of (t0, t1, cell index), via exact line keys."""
    from .partition import _line_key, _key_direction

    by_line: dict = {}
    for ci, cell in enumerate(cells):
        for p, q in cell.edges():
            key = _line_key(p, q)
            d = _key_direction(key)
            t0, t1 = float(p.dot(d)), float(q.dot(d))
            if t1 < t0:
                t0, t1 = t1, t0
            by_line.setdefault(key, []).append((t0, t1, ci))
    return by_line


def _boundary_dot_lines(dots: DotPattern, slopes, lattice, cells,
                        cell_labels, xy, labels) -> list:
    """Exact lines through clusters of boundary-hit dots.

    Dots voting against their cell are boundary candidates; groups of at
    least two sharing an exact golden intercept for some admissible slope
    define a line with zero measurement error.
    """
    wrong = []
    for ci, cell in enumerate(cells):
        idx = _cell_dots(cell, xy)
        if len(idx):
            wrong.extend(int(i) for i in idx[labels[idx] != cell_labels[ci]])
    if not wrong:
        return []
    exact = []
    for i in wrong:
        c1, c2 = dots.coeffs[i]
        exact.append(lattice.g1.scale(c1) + lattice.g2.scale(c2))
    fd = fundamental_cell(lattice)
    out = []
    for slope in slopes:
        groups: dict = {}
        for p in exact:
            v = p.x if slope is None else p.y - slope * p.x
            groups.setdefault(v, []).append(p)
        for v, members in groups.items():
            if len(members) < 2:
                continue
            line = CandidateLine(slope, v)
            if _crosses_domain(line, fd):
                out.append(line)
    return out


def _shared_edge_lengths(cells):
    """cell-pair -> total shared edge length (float)."""
    shared: dict = {}
    for pieces in _edges_by_line(cells).values():
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


def _load_bearing_lines(lines: list, cells: list, cell_labels: list,
                        dot_bearing: list) -> list:
    """Lines witnessed by dots: somewhere along the line, two dot-bearing
    cells with different labels share an edge piece.

    Everything else is arrangement scaffolding; dropping it lets the
    dot-free slivers it cut off merge back into their true atoms.
    """
    from .partition import _line_key

    by_line = _edges_by_line(cells)
    keep = []
    for line in lines:
        a, b = line.anchor_points()
        pieces = by_line.get(_line_key(a, b), [])
        witnessed = False
        for i in range(len(pieces)):
            a0, a1, ca = pieces[i]
            for j in range(i + 1, len(pieces)):
                b0, b1, cb = pieces[j]
                if min(a1, b1) - max(a0, b0) <= 1e-12:
                    continue
                if (cell_labels[ca] != cell_labels[cb]
                        and dot_bearing[ca] and dot_bearing[cb]):
                    witnessed = True
                    break
            if witnessed:
                break
        if witnessed:
            keep.append(line)
    return keep


def _label_cells(cells, xy, labels):
    """Majority label per cell; dot-free cells follow their neighbours.

    A dot-free cell takes the label of the labeled cell it shares the
    longest boundary with (chains resolve iteratively); isolated leftovers
    fall back to the nearest dot.  Returns (labels per cell, number of
    interior dots voting against their cell's final label).
    """
    votes = []
    for cell in cells:
        votes.append(_cell_dots(cell, xy))
    cell_labels: list = [None] * len(cells)
    for ci in range(len(cells)):
        if len(votes[ci]):
            cell_labels[ci] = int(np.bincount(labels[votes[ci]]).argmax())
    if any(lab is None for lab in cell_labels):
        shared = _shared_edge_lengths(cells)
        neighbours: dict = {}
        for (a, b), ln in shared.items():
            neighbours.setdefault(a, []).append((ln, b))
            neighbours.setdefault(b, []).append((ln, a))
        pending = [ci for ci in range(len(cells)) if cell_labels[ci] is None]
        while pending:
            progressed = False
            rest = []
            for ci in pending:
                options = [
                    (ln, nb) for ln, nb in neighbours.get(ci, [])
                    if cell_labels[nb] is not None
                ]
                if options:
                    options.sort(key=lambda o: (-o[0], o[1]))
                    cell_labels[ci] = cell_labels[options[0][1]]
                    progressed = True
                else:
                    rest.append(ci)
            pending = rest
            if not progressed:
                break
        for ci in pending:  # no labeled neighbour at all: nearest dot
            cx, cy = cells[ci].centroid().as_floats()
            d2 = (xy[:, 0] - cx) ** 2 + (xy[:, 1] - cy) ** 2
            cell_labels[ci] = int(labels[int(np.argmin(d2))])
    misclassified = 0
    for ci, cand in enumerate(votes):
        misclassified += int((labels[cand] != cell_labels[ci]).sum())
    return cell_labels, misclassified


class FrequencyRow(NamedTuple):
    label: int
    count: int
    empirical: float
    exact: Golden
    exact_float: float
    deviation: float


class FrequencyReport(NamedTuple):
    rows: list  # FrequencyRow
    max_deviation: float


def frequency_report(patch: Patch, partition: Partition) -> FrequencyReport:
    """Tile counts against exact atom-area fractions of the torus."""
    from .partition import LabelMismatchError

    total = len(patch.cells)
    counts = np.bincount(np.array(patch.cells), minlength=0)
    part_labels = set(partition.labels())
    patch_labels = {int(c) for c in patch.cells}
    if not patch_labels <= part_labels:
        raise LabelMismatchError(
            f"patch labels {sorted(patch_labels - part_labels)} missing "
            f"from partition")
    covol = partition.lattice.covolume()
    rows = []
    for label in sorted(part_labels):
        count = int(counts[label]) if label < len(counts) else 0
        empirical = count / total
        exact = partition.area(label) / covol
        ef = float(exact)
        rows.append(FrequencyRow(label, count, empirical, exact, ef,
                                 abs(empirical - ef)))
    return FrequencyReport(rows, max(r.deviation for r in rows))
