"""Golden lattices, canonical torus reduction and Z^2 rotation actions.

Torus points are stored by generator coefficients in [0,1)^2, so equality,
hashing and box counting are exact and independent of the lattice shape.
One-dimensional golden rotations (Fibonacci word, near-return records)
live here too.
"""

from __future__ import annotations

from math import ceil
from typing import Iterable, NamedTuple

from .goldfield import GMatrix2, Golden, GPoint, SingularMatrixError, mod1


class Lattice2:
    """Rank-2 lattice spanned by two golden generators."""

    __slots__ = ("g1", "g2", "basis", "basis_inv")

    def __init__(self, g1: GPoint, g2: GPoint):
        basis = GMatrix2.from_columns(g1, g2)
        if basis.det().is_zero():
            raise SingularMatrixError("degenerate lattice generators")
        object.__setattr__(self, "g1", g1)
        object.__setattr__(self, "g2", g2)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "basis_inv", basis.inverse())

    def __setattr__(self, *_):
        raise AttributeError("Lattice2 is immutable")

    def det(self) -> Golden:
        return self.basis.det()

    def covolume(self) -> Golden:
        return abs(self.basis.det())

    def vector(self, i: int, j: int) -> GPoint:
        """The lattice element i*g1 + j*g2."""
        return self.g1.scale(i) + self.g2.scale(j)

    def __eq__(self, other):
        return isinstance(other, Lattice2) and self.g1 == other.g1 and self.g2 == other.g2

    def __hash__(self):
        return hash((self.g1, self.g2))

    def __repr__(self):
        return f"Lattice2({self.g1!r}, {self.g2!r})"


class TorusPoint:
    """Point of R^2/Gamma as exact generator coefficients in [0,1)^2."""

    __slots__ = ("lattice", "c1", "c2")

    def __init__(self, lattice: Lattice2, c1: Golden, c2: Golden):
        if not (0 <= c1 < 1 and 0 <= c2 < 1):
            raise ValueError("torus coefficients must lie in [0,1)")
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)

    def __setattr__(self, *_):
        raise AttributeError("TorusPoint is immutable")

    def xy(self) -> GPoint:
        """Plane representative c1*g1 + c2*g2 in the fundamental domain."""
        return self.lattice.g1.scale(self.c1) + self.lattice.g2.scale(self.c2)

    def coeffs(self) -> tuple[Golden, Golden]:
        return (self.c1, self.c2)

    def __eq__(self, other):
        return (
            isinstance(other, TorusPoint)
            and self.lattice == other.lattice
            and self.c1 == other.c1
            and self.c2 == other.c2
        )

    def __hash__(self):
        return hash((self.lattice, self.c1, self.c2))

    def __repr__(self):
        return f"TorusPoint({self.c1}, {self.c2})"


def reduce_mod_lattice(p: GPoint, lattice: Lattice2) -> TorusPoint:
    """Canonical representative of p modulo the lattice, exactly."""
    c = lattice.basis_inv.mul_point(p)
    return TorusPoint(lattice, mod1(c.x), mod1(c.y))


def rotate(tp: TorusPoint, n: tuple[int, int]) -> TorusPoint:
    """The Z^2 rotation action: translate by n, then reduce."""
    lat = tp.lattice
    shift = lat.basis_inv.mul_point(GPoint(n[0], n[1]))
    return TorusPoint(lat, mod1(tp.c1 + shift.x), mod1(tp.c2 + shift.y))


Window = tuple[tuple[int, int], tuple[int, int]]  # ((x0,x1),(y0,y1)) inclusive


def window_points(window: Window) -> Iterable[tuple[int, int]]:
    (x0, x1), (y0, y1) = window
    for ny in range(y0, y1 + 1):
        for nx in range(x0, x1 + 1):
            yield (nx, ny)


def square_window(radius: int) -> Window:
    return ((-radius, radius), (-radius, radius))


def orbit_window(p: GPoint, lattice: Lattice2, window: Window) -> dict:
    """Exact orbit points R^n(p) for every n in the window.

    Works incrementally in coefficient space: stepping by e1 adds a fixed
    golden vector, so denominators stay bounded across the whole window.
    """
    binv = lattice.basis_inv
    step_x = binv.mul_point(GPoint(1, 0))
    step_y = binv.mul_point(GPoint(0, 1))
    base = binv.mul_point(p)
    (x0, x1), (y0, y1) = window
    out = {}
    row1 = base.x + step_x.x * x0 + step_y.x * y0
    row2 = base.y + step_x.y * x0 + step_y.y * y0
    for ny in range(y0, y1 + 1):
        c1, c2 = row1, row2
        for nx in range(x0, x1 + 1):
            out[(nx, ny)] = TorusPoint(lattice, mod1(c1), mod1(c2))
            c1 += step_x.x
            c2 += step_x.y
        row1 += step_y.x
        row2 += step_y.y
    return out


def lattice_equivalent(l1: Lattice2, l2: Lattice2) -> bool:
    """True iff the lattices are equal as point sets.

    Exact test: B1^-1 B2 must be an integer matrix of determinant +-1.
    """
    m = l1.basis_inv.mul_matrix(l2.basis)
    entries = (m.m00, m.m01, m.m10, m.m11)
    if not all(e.is_integer() for e in entries):
        return False
    det = m.det()
    return det == Golden(1) or det == Golden(-1)


# -- 1-dimensional golden rotations ---------------------------------------


class Rotation1D:
    """Rotation x -> x + n (mod modulus) with a two-interval partition.

    Interval [0, cut) encodes symbol 0, [cut, modulus) symbol 1; the
    half-open convention puts the endpoints 0 and cut with their right
    neighbours.
    """

    __slots__ = ("modulus", "cut")

    def __init__(self, modulus: Golden, cut: Golden):
        if not modulus.sign() > 0:
            raise ValueError("modulus must be positive")
        if not (Golden(0) < cut < modulus):
            raise ValueError("cut must lie strictly inside (0, modulus)")
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "cut", cut)

    def __setattr__(self, *_):
        raise AttributeError("Rotation1D is immutable")


def mod_interval(x: Golden, modulus: Golden) -> Golden:
    """x reduced into [0, modulus), exactly."""
    return x - modulus * (x / modulus).floor()


def rotation1d_encode(x: Golden, rot: Rotation1D, n0: int, n1: int) -> str:
    """Symbols for n = n0..n1: '0' iff x + n (mod modulus) lies in [0, cut)."""
    out = []
    for n in range(n0, n1 + 1):
        y = mod_interval(x + n, rot.modulus)
        out.append("0" if y < rot.cut else "1")
    return "".join(out)


class NearReturn(NamedTuple):
    n: int
    distance: Golden
    distance_float: float
    record: bool


def near_return_profile(x: Golden, modulus: Golden, n_max: int) -> list[NearReturn]:
    """Circle distance of R^n(x) to x for n = 1..n_max, with record times.

    A record is a strictly new minimum over 1..n.  Distances are exact
    golden numbers; the float column is for reporting only.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    x0 = mod_interval(x, modulus)
    out = []
    best = None
    for n in range(1, n_max + 1):
        r = mod_interval(x + n, modulus)
        delta = abs(r - x0)
        dist = min(delta, modulus - delta)
        record = best is None or dist < best
        if record:
            best = dist
        out.append(NearReturn(n, dist, float(dist), record))
    return out


class DensityReport(NamedTuple):
    boxes_per_side: int
    boxes_hit: int
    boxes_total: int
    fraction: float


def orbit_density_check(p: GPoint, lattice: Lattice2, eps: float, n_max: int) -> DensityReport:
    """Fraction of eps-boxes of the fundamental domain hit by a finite orbit.

    The coefficient square [0,1)^2 is split into ceil(1/eps)^2 congruent
    boxes; a box is hit when some R^n(p) with Chebyshev norm of n <= n_max
    lands in it.  Box indices use exact floors.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    k = ceil(1 / eps)
    hit = set()
    for tp in orbit_window(p, lattice, square_window(n_max)).values():
        hit.add(((tp.c1 * k).floor(), (tp.c2 * k).floor()))
    total = k * k
    return DensityReport(k, len(hit), total, len(hit) / total)
