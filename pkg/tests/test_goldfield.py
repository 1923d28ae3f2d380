"""Exact golden-field arithmetic: axioms, sign/floor oracles, grammar."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wangdyn.goldfield import (
    GMatrix2,
    Golden,
    GoldenParseError,
    GPoint,
    IDENTITY2,
    PHI,
    SingularMatrixError,
    format_golden,
    golden,
    parse_golden,
)

rationals = st.fractions(
    min_value=Fraction(-1000), max_value=Fraction(1000), max_denominator=97
)
goldens = st.builds(Golden, rationals, rationals)


def sqrt5_sign(x: Golden) -> int:
    """Independent sign oracle in the {1, sqrt5} basis, by squaring."""
    u = x.a + Fraction(x.b, 2)  # x = u + v*sqrt(5)
    v = Fraction(x.b, 2)
    if v == 0:
        return 0 if u == 0 else (1 if u > 0 else -1)
    if u == 0:
        return 1 if v > 0 else -1
    if u > 0 and v > 0:
        return 1
    if u < 0 and v < 0:
        return -1
    lhs, rhs = u * u, 5 * v * v
    if u > 0:  # v < 0: positive iff u^2 > 5 v^2
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


class TestArithmetic:
    def test_phi_squared_is_phi_plus_one(self):
        assert PHI * PHI == PHI + 1

    def test_phi_minus_one_times_phi_is_one(self):
        assert (PHI - 1) * PHI == Golden(1)

    def test_inverse_of_4phi_plus_1(self):
        # solve (4phi+1) * z = 1; z = (4phi-5)/11
        z = Golden(1) / Golden(1, 4)
        assert z == Golden(Fraction(-5, 11), Fraction(4, 11))
        assert z * Golden(1, 4) == Golden(1)

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            Golden(1) / Golden(0)

    def test_mixed_scalar_ops(self):
        assert PHI + 1 == Golden(1, 1)
        assert 2 * PHI == Golden(0, 2)
        assert 1 - PHI == Golden(1, -1)
        assert (1 / PHI) == PHI - 1

    @given(goldens, goldens, goldens)
    @settings(max_examples=200)
    def test_distributivity(self, x, y, z):
        assert (x + y) * z == x * z + y * z

    @given(goldens)
    @settings(max_examples=200)
    def test_multiplicative_inverse(self, x):
        if not x.is_zero():
            assert x * x.inverse() == Golden(1)

    @given(goldens, goldens)
    @settings(max_examples=200)
    def test_norm_multiplicative(self, x, y):
        assert (x * y).norm() == x.norm() * y.norm()


class TestSignFloor:
    def test_sign_examples(self):
        assert Golden(0, 0).sign() == 0
        assert Golden(3, -2).sign() == -1  # 3 - 2 phi ~ -0.236
        assert Golden(5, -3).sign() == 1  # 5 - 3 phi ~ 0.146

    def test_floor_examples(self):
        assert Golden(0, 2).floor() == 3  # 2 phi ~ 3.236
        assert Golden(0, -1).floor() == -2  # -phi ~ -1.618
        assert Golden(7).floor() == 7

    def test_sign_against_sqrt5_oracle_bulk(self):
        rng = random.Random(12345)
        for _ in range(100_000):
            a = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 1000))
            b = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 1000))
            x = Golden(a, b)
            assert x.sign() == sqrt5_sign(x)

    def test_floor_bracket_bulk(self):
        rng = random.Random(999)
        for _ in range(100_000):
            a = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 1000))
            b = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 1000))
            x = Golden(a, b)
            k = x.floor()
            assert (x - k).sign() >= 0
            assert (x - (k + 1)).sign() < 0

    def test_floor_huge_coefficients(self):
        x = Golden(10**40, -(10**40))
        k = x.floor()
        assert (x - k).sign() >= 0 and (x - (k + 1)).sign() < 0

    @given(goldens, goldens)
    @settings(max_examples=200)
    def test_order_consistent_with_difference(self, x, y):
        assert (x < y) == ((y - x).sign() > 0)


class TestMatrix:
    def test_inverse_of_gamma0_generator_matrix(self):
        m = GMatrix2.from_columns(GPoint(PHI, 0), GPoint(1, PHI + 3))
        inv = m.inverse()
        assert inv.m00 == PHI - 1
        assert inv.m01 == Golden(Fraction(5, 11), Fraction(-4, 11))
        assert inv.m10 == Golden(0)
        assert inv.m11 == Golden(Fraction(4, 11), Fraction(-1, 11))
        assert m.mul_matrix(inv) == IDENTITY2

    def test_identity_inverse(self):
        assert IDENTITY2.inverse() == IDENTITY2

    def test_singular(self):
        m = GMatrix2.from_columns(GPoint(PHI, 0), GPoint(2 * PHI, 0))
        with pytest.raises(SingularMatrixError):
            m.inverse()

    @given(goldens, goldens, goldens, goldens)
    @settings(max_examples=100)
    def test_inverse_roundtrip(self, a, b, c, d):
        m = GMatrix2(a, b, c, d)
        if not m.det().is_zero():
            assert m.mul_matrix(m.inverse()) == IDENTITY2


class TestGrammar:
    @pytest.mark.parametrize(
        "text,a,b",
        [
            ("3/2*phi-1", -1, Fraction(3, 2)),
            ("2-phi", 2, -1),
            ("5", 5, 0),
            ("phi", 0, 1),
            ("-phi", 0, -1),
            ("phi+3", 3, 1),
            ("-1+3/2*phi", -1, Fraction(3, 2)),
            ("0", 0, 0),
            ("-7/3", Fraction(-7, 3), 0),
            ("2*phi", 0, 2),
        ],
    )
    def test_parse(self, text, a, b):
        assert parse_golden(text) == Golden(a, b)

    @pytest.mark.parametrize("bad", ["", "phi+phi", "1+2", "1++phi", "x", "1/0", "2phi"])
    def test_parse_errors(self, bad):
        with pytest.raises(GoldenParseError):
            parse_golden(bad)

    @given(goldens)
    @settings(max_examples=300)
    def test_roundtrip(self, x):
        assert parse_golden(format_golden(x)) == x

    def test_canonical_examples(self):
        assert format_golden(Golden(2, -1)) == "2-phi"
        assert format_golden(Golden(-1, Fraction(3, 2))) == "-1+3/2*phi"
        assert format_golden(golden(0, 0)) == "0"
        assert format_golden(PHI) == "phi"
