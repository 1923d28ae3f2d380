"""From partitioned torus to configurations: orbit encoding and boundary
analysis.

The boundary limit is implemented by exact side-of-line predicates (which
atom does the direction v point into), never by adding a numeric epsilon,
so there is no tolerance to tune.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from .geometry import Region, region_area, region_intersect
from .goldfield import Golden, GPoint
from .partition import Boundary, Partition, region_shift_image
from .torusdyn import TorusPoint, Window, orbit_window
from .wangcore import Patch, Protoset, check_validity


class DirectionParallelToBoundaryError(ValueError):
    pass


def direction_admissible(partition: Partition, v: GPoint) -> bool:
    """True when v is parallel to no boundary segment of the partition."""
    if v.x.is_zero() and v.y.is_zero():
        return False
    for seg in partition.boundary_segments():
        d = seg.q - seg.p
        if d.cross(v).is_zero():
            return False
    return True


def pick_direction(partition: Partition) -> GPoint:
    """A small admissible direction for encodings that do not care."""
    for cand in ((-1, 1), (1, 2), (2, 1), (1, -2), (-2, 3), (3, -1)):
        v = GPoint(cand[0], cand[1])
        if direction_admissible(partition, v):
            return v
    raise DirectionParallelToBoundaryError(
        "no small admissible direction found")


@dataclass(frozen=True)
class EncodingSpec:
    partition: Partition
    start: GPoint
    direction: GPoint
    window: Window

    def __post_init__(self):
        if not direction_admissible(self.partition, self.direction):
            raise DirectionParallelToBoundaryError(
                f"direction {self.direction!r} is parallel to a boundary "
                f"segment (or zero)")


class HitSet(NamedTuple):
    """Window positions whose orbit point lies on the partition boundary."""

    positions: tuple  # sorted (nx, ny)
    labels: dict  # position -> tuple of adjacent atom labels


def _window_geometry(window: Window):
    (x0, x1), (y0, y1) = window
    return x0, y0, x1 - x0 + 1, y1 - y0 + 1


def _orbit_floats(partition: Partition, pts: dict, order: list) -> np.ndarray:
    g1x, g1y = partition.lattice.g1.as_floats()
    g2x, g2y = partition.lattice.g2.as_floats()
    c = np.array([(float(pts[n].c1), float(pts[n].c2)) for n in order])
    xy = np.empty_like(c)
    xy[:, 0] = c[:, 0] * g1x + c[:, 1] * g2x
    xy[:, 1] = c[:, 0] * g1y + c[:, 1] * g2y
    return xy


def sr_encode(spec: EncodingSpec) -> Patch:
    """Configuration spelled by the orbit of the start point.

    Interior orbit points take their atom's label; boundary points take
    the unique atom entered along the direction, decided exactly.
    """
    part = spec.partition
    x0, y0, w, h = _window_geometry(spec.window)
    pts = orbit_window(spec.start, part.lattice, spec.window)
    order = [(x0 + k % w, y0 + k // w) for k in range(w * h)]
    labels = part.locator().locate_batch(_orbit_floats(part, pts, order))
    cells = labels.tolist()
    for i in np.nonzero(labels < 0)[0]:
        cells[int(i)] = part.locate_with_direction(pts[order[int(i)]],
                                                   spec.direction)
    return Patch((x0, y0), w, h, cells)


def boundary_hits(partition: Partition, p: GPoint, window: Window) -> HitSet:
    """Exact set of window positions whose orbit point lies on the boundary."""
    x0, y0, w, h = _window_geometry(window)
    pts = orbit_window(p, partition.lattice, window)
    order = [(x0 + k % w, y0 + k // w) for k in range(w * h)]
    coarse = partition.locator().locate_batch(_orbit_floats(partition, pts, order))
    positions = []
    labels = {}
    for i in np.nonzero(coarse < 0)[0]:
        n = order[int(i)]
        loc = partition.point_locate(pts[n])
        if isinstance(loc, Boundary):
            positions.append(n)
            labels[n] = loc.labels
    positions.sort()
    return HitSet(tuple(positions), labels)


def hitset_to_csv(hits: HitSet) -> str:
    lines = ["n_x,n_y,labels"]
    for pos in hits.positions:
        lines.append(f"{pos[0]},{pos[1]},{'|'.join(map(str, hits.labels[pos]))}")
    return "\n".join(lines) + "\n"


def dn_region(partition: Partition, pattern: dict) -> Region:
    """Intersection of pulled-back atoms over the pattern's support.

    Empty result means the pattern is not allowed; for patterns read off
    an orbit the region contains the generating point.  Support cells are
    intersected nearest-first so the region shrinks quickly.
    """
    items = sorted(pattern.items(),
                   key=lambda kv: (max(abs(kv[0][0]), abs(kv[0][1])), kv[0]))
    region: Optional[Region] = None
    for (nx, ny), label in items:
        pulled = region_shift_image(partition.atom_region(label),
                                    partition.lattice, (-nx, -ny))
        region = pulled if region is None else region_intersect(region, pulled)
        if not region:
            return []
    return region or []


class DirectionReport(NamedTuple):
    direction: tuple[int, int]
    strips: tuple  # tuple of tuples of positions


def nonexpansive_directions(hits: HitSet, min_support: int = 5,
                            width: float = 1.5,
                            max_coord: int = 12) -> list[DirectionReport]:
    """Primitive directions whose strips organise the hit set.

    A strip is a maximal group of hits within perpendicular distance
    `width` of a common line of the given direction; only strips with at
    least `min_support` members are reported.  Reporting thresholds, not
    claims about the true nonexpansive set.
    """
    pos = list(hits.positions)
    if len(pos) < 2:
        return []
    dirs = set()
    arr = np.array(pos, dtype=np.int64)
    n = len(arr)
    for i in range(n):
        dx = arr[i + 1:, 0] - arr[i, 0]
        dy = arr[i + 1:, 1] - arr[i, 1]
        keep = (np.abs(dx) <= max_coord) & (np.abs(dy) <= max_coord)
        for ddx, ddy in zip(dx[keep], dy[keep]):
            g = math.gcd(int(ddx), int(ddy))
            if g == 0:
                continue
            d = (int(ddx) // g, int(ddy) // g)
            if d[0] < 0 or (d[0] == 0 and d[1] < 0):
                d = (-d[0], -d[1])
            dirs.add(d)
    reports = []
    for d in sorted(dirs):
        norm = math.hypot(d[0], d[1])
        ts = (arr[:, 0] * d[1] - arr[:, 1] * d[0]) / norm
        order = np.argsort(ts, kind="stable")
        strips = []
        start = 0
        for i in range(1, n + 1):
            if i == n or ts[order[i]] - ts[order[start]] > 2 * width:
                if i - start >= min_support:
                    strips.append(tuple(sorted(tuple(arr[j]) for j in order[start:i])))
                start = i
        if strips:
            reports.append(DirectionReport(d, tuple(strips)))
    reports.sort(key=lambda r: (-sum(len(s) for s in r.strips), r.direction))
    return reports


class ResolutionPair(NamedTuple):
    plus: Patch
    minus: Patch
    diff: tuple  # sorted positions where the two encodings differ


def resolution_pair(partition: Partition, p: GPoint, v: GPoint,
                    window: Window) -> ResolutionPair:
    """Encodings with v and -v; they differ only on boundary-hit cells."""
    plus = sr_encode(EncodingSpec(partition, p, v, window))
    minus = sr_encode(EncodingSpec(partition, p, GPoint(-v.x, -v.y), window))
    diff = tuple(
        pos for pos in plus.positions() if plus.get(*pos) != minus.get(*pos)
    )
    return ResolutionPair(plus, minus, diff)


class SubsetCheckReport(NamedTuple):
    trials: int
    violations: list  # (start point as float pair, violation list)


def empirical_subset_check(partition: Partition, protoset: Protoset,
                           trials: int, window: Window,
                           seed: int = 0) -> SubsetCheckReport:
    """Random orbits must encode valid patches (X subset of Omega, locally).

    Starting points are random rationals in coefficient coordinates; any
    validity violation is reported with its generating point.
    """
    rng = random.Random(seed)
    v = pick_direction(partition)
    lattice = partition.lattice
    bad = []
    for _ in range(trials):
        c1 = Fraction(rng.randrange(10**6), 10**6)
        c2 = Fraction(rng.randrange(10**6), 10**6)
        start = lattice.g1.scale(c1) + lattice.g2.scale(c2)
        patch = sr_encode(EncodingSpec(partition, start, v, window))
        violations = check_validity(patch, protoset)
        if violations:
            bad.append(((float(c1), float(c2)), violations))
    return SubsetCheckReport(trials, bad)
