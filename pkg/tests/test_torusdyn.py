"""Torus reduction, rotation action, golden 1-D rotations, lattice tests."""

import random
from fractions import Fraction

import pytest

from wangdyn.goldfield import Golden, GPoint, PHI, SingularMatrixError, mod1
from wangdyn.registry import get_lattice
from wangdyn.torusdyn import (
    DensityReport,
    Lattice2,
    Rotation1D,
    lattice_equivalent,
    near_return_profile,
    orbit_density_check,
    orbit_window,
    reduce_mod_lattice,
    rotate,
    rotation1d_encode,
    square_window,
)

FIB = {1, 2, 3, 5, 8, 13, 21, 34, 55, 89}


@pytest.fixture(scope="module")
def gamma24():
    return get_lattice("gamma24")


@pytest.fixture(scope="module")
def gamma0():
    return get_lattice("gamma0")


def rand_golden(rng, span=20):
    return Golden(
        Fraction(rng.randint(-span, span), rng.randint(1, 7)),
        Fraction(rng.randint(-span, span), rng.randint(1, 7)),
    )


class TestReduce:
    def test_zero(self, gamma24):
        tp = reduce_mod_lattice(GPoint(0, 0), gamma24)
        assert tp.coeffs() == (Golden(0), Golden(0))

    def test_two_zero(self, gamma24):
        tp = reduce_mod_lattice(GPoint(2, 0), gamma24)
        assert tp.xy() == GPoint(Golden(2, -1), Golden(0))

    def test_five_seven(self, gamma24):
        tp = reduce_mod_lattice(GPoint(5, 7), gamma24)
        assert tp.xy() == GPoint(Golden(5, -3), Golden(7, -4))

    def test_idempotent(self, gamma0):
        rng = random.Random(3)
        for _ in range(50):
            p = GPoint(rand_golden(rng), rand_golden(rng))
            tp = reduce_mod_lattice(p, gamma0)
            again = reduce_mod_lattice(tp.xy(), gamma0)
            assert again == tp

    def test_degenerate_lattice_rejected(self):
        with pytest.raises(SingularMatrixError):
            Lattice2(GPoint(PHI, 0), GPoint(2 * PHI, 0))


class TestRotate:
    def test_identity(self, gamma24):
        tp = reduce_mod_lattice(GPoint(Fraction(1, 3), Fraction(1, 7)), gamma24)
        assert rotate(tp, (0, 0)) == tp

    def test_basic_steps(self, gamma24):
        tp = reduce_mod_lattice(GPoint(0, 0), gamma24)
        one = rotate(tp, (1, 0))
        assert one.xy() == GPoint(Golden(1), Golden(0))
        two = rotate(one, (1, 0))
        assert two.xy() == GPoint(Golden(2, -1), Golden(0))

    def test_group_action_law(self, gamma0, gamma24):
        rng = random.Random(11)
        for lat in (gamma0, gamma24):
            for _ in range(40):
                tp = reduce_mod_lattice(GPoint(rand_golden(rng), rand_golden(rng)), lat)
                m = (rng.randint(-50, 50), rng.randint(-50, 50))
                n = (rng.randint(-50, 50), rng.randint(-50, 50))
                lhs = rotate(tp, (m[0] + n[0], m[1] + n[1]))
                rhs = rotate(rotate(tp, m), n)
                assert lhs == rhs


class TestOrbit:
    def test_singleton_window(self, gamma0):
        p = GPoint(Fraction(1, 2), Fraction(1, 3))
        orbit = orbit_window(p, gamma0, ((0, 0), (0, 0)))
        assert orbit == {(0, 0): reduce_mod_lattice(p, gamma0)}

    def test_row_matches_rotate(self, gamma24):
        orbit = orbit_window(GPoint(0, 0), gamma24, ((0, 2), (0, 0)))
        base = reduce_mod_lattice(GPoint(0, 0), gamma24)
        for nx in range(3):
            assert orbit[(nx, 0)] == rotate(base, (nx, 0))
        assert orbit[(2, 0)].xy() == GPoint(Golden(2, -1), Golden(0))

    def test_freeness_distinct_points(self, gamma0):
        # irrational lattice: distinct n give distinct orbit points
        orbit = orbit_window(GPoint(0, 0), gamma0, ((0, 35), (0, 27)))
        points = list(orbit.values())
        assert len(set(points)) == len(points) > 1000

    def test_pullback_identity_eq4(self, gamma0, gamma24):
        # reduce(L^-1 n, Z^2) equals L^-1 (n mod L) mod Z^2, exactly
        for lat in (gamma0, gamma24):
            binv = lat.basis_inv
            for (nx, ny), tp in orbit_window(GPoint(0, 0), lat, ((-6, 6), (-6, 6))).items():
                q = binv.mul_point(GPoint(nx, ny))
                lhs = (mod1(q.x), mod1(q.y))
                t = binv.mul_point(tp.xy())
                rhs = (mod1(t.x), mod1(t.y))
                assert lhs == rhs


class TestLatticeEquivalence:
    def test_gamma2_alternative_generators(self):
        l1 = Lattice2(GPoint(PHI, 0), GPoint(Golden(2, -1), PHI + 3))
        l2 = Lattice2(GPoint(PHI, 0), GPoint(Golden(2), PHI + 3))
        assert lattice_equivalent(l1, l2)

    def test_self(self, gamma0):
        assert lattice_equivalent(gamma0, gamma0)

    def test_different(self, gamma0, gamma24):
        assert not lattice_equivalent(gamma0, gamma24)

    def test_swapped_generators(self, gamma24):
        swapped = Lattice2(gamma24.g2, gamma24.g1)
        assert lattice_equivalent(gamma24, swapped)


class TestRotation1D:
    def test_fibonacci_word(self):
        rot = Rotation1D(PHI + 1, PHI)
        assert rotation1d_encode(Golden(0), rot, 0, 20) == "001001010010010100101"

    def test_cut_point_gets_symbol_one(self):
        rot = Rotation1D(PHI + 1, PHI)
        assert rotation1d_encode(PHI, rot, 0, 0) == "1"

    def test_n_two(self):
        rot = Rotation1D(PHI + 1, PHI)
        assert rotation1d_encode(Golden(0), rot, 2, 2) == "1"

    def test_against_substitution_oracle(self):
        # 0 -> 01, 1 -> 0; the encoding of 0 from n=1 is the fixed point.
        s = "0"
        while len(s) < 220:
            s = "".join("01" if ch == "0" else "0" for ch in s)
        rot = Rotation1D(PHI + 1, PHI)
        enc = rotation1d_encode(Golden(0), rot, 0, 201)
        assert enc[1:] == s[: len(enc) - 1]

    def test_invalid_cut(self):
        with pytest.raises(ValueError):
            Rotation1D(PHI, PHI)
        with pytest.raises(ValueError):
            Rotation1D(Golden(0), Golden(1))


class TestNearReturns:
    def test_records_are_fibonacci(self):
        prof = near_return_profile(Golden(0), PHI + 1, 100)
        records = {e.n for e in prof if e.record}
        assert records <= FIB

    def test_brute_force_oracle(self):
        # records = strictly-new minima of the float distance column
        prof = near_return_profile(Golden(0), PHI + 1, 100)
        best = float("inf")
        for e in prof:
            expected = e.distance_float < best - 1e-15
            assert e.record == expected
            if expected:
                best = e.distance_float

    def test_n8_exact_value(self):
        prof = near_return_profile(Golden(0), PHI + 1, 8)
        assert prof[7].distance == Golden(5, -3)

    def test_distance_at_zero_offset(self):
        prof = near_return_profile(Golden(Fraction(1, 3)), Golden(2), 4)
        assert prof[1].distance == Golden(0)  # n=2 returns exactly mod 2


class TestDensity:
    def test_full_cover(self, gamma24):
        rep = orbit_density_check(GPoint(0, 0), gamma24, 0.1, 60)
        assert rep.fraction == 1.0

    def test_single_box_at_n_zero(self, gamma24):
        rep = orbit_density_check(GPoint(0, 0), gamma24, 0.1, 0)
        assert rep.boxes_hit == 1

    def test_monotone_in_n(self, gamma24):
        fractions = [
            orbit_density_check(GPoint(0, 0), gamma24, 0.25, n).fraction
            for n in (0, 2, 5, 9, 14)
        ]
        assert fractions == sorted(fractions)
