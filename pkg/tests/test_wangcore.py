"""Tiles, patches, validity checking and the configuration metric."""

from fractions import Fraction

import pytest

from wangdyn.registry import get_protoset
from wangdyn.wangcore import (
    HORIZONTAL,
    UNASSIGNED,
    VERTICAL,
    DuplicateTileError,
    MalformedRecordError,
    NoCommonWindowError,
    Patch,
    Protoset,
    TileIndexError,
    check_validity,
    config_distance,
    patch_from_json,
    patch_to_json,
    protoset_from_json,
    protoset_to_json,
    shift_patch,
)


@pytest.fixture(scope="module")
def jr0():
    return get_protoset("jr0")


class TestProtoset:
    def test_builtin_sizes(self):
        assert len(get_protoset("jr0")) == 11
        assert len(get_protoset("jr2")) == 11
        assert len(get_protoset("penrose24")) == 24

    def test_duplicate_rejected(self):
        with pytest.raises(DuplicateTileError):
            Protoset([(0, 0, 0, 0), (0, 0, 0, 0)])

    def test_malformed_rejected(self):
        with pytest.raises(MalformedRecordError):
            Protoset([(0, 0, 0)])
        with pytest.raises(MalformedRecordError):
            Protoset([(0, 0, 0, -1)])
        with pytest.raises(MalformedRecordError):
            Protoset([])

    def test_forbidden_counts_jr0(self, jr0):
        horiz, vert = jr0.forbidden_pairs()
        assert (0, 1) not in horiz  # Right(T0)=2=Left(T1)
        assert len(horiz) == 90
        assert len(vert) == 86

    def test_forbidden_agrees_with_two_cell_validity(self):
        # A 2x1 (resp. 1x2) patch [i, j] is valid iff (i, j) not forbidden.
        for name in ("jr0", "jr2", "penrose24"):
            ps = get_protoset(name)
            horiz, vert = ps.forbidden_pairs()
            n = len(ps)
            for i in range(n):
                for j in range(n):
                    h_ok = not check_validity(Patch((0, 0), 2, 1, [i, j]), ps)
                    assert h_ok == ((i, j) not in horiz)
                    v_ok = not check_validity(Patch((0, 0), 1, 2, [i, j]), ps)
                    assert v_ok == ((i, j) not in vert)

    def test_json_roundtrip(self, jr0):
        assert protoset_from_json(protoset_to_json(jr0)) == jr0


class TestValidity:
    def test_single_cell_always_valid(self, jr0):
        for i in range(len(jr0)):
            assert check_validity(Patch((0, 0), 1, 1, [i]), jr0) == []

    def test_matching_pair(self, jr0):
        assert check_validity(Patch((0, 0), 2, 1, [0, 1]), jr0) == []

    def test_clashing_pair(self, jr0):
        vs = check_validity(Patch((0, 0), 2, 1, [0, 2]), jr0)
        assert vs == [((0, 0), HORIZONTAL, (2, 3))]

    def test_unassigned_skipped(self, jr0):
        assert check_validity(Patch((0, 0), 2, 1, [0, UNASSIGNED]), jr0) == []

    def test_out_of_range_index(self, jr0):
        with pytest.raises(TileIndexError):
            check_validity(Patch((0, 0), 1, 1, [11]), jr0)

    def test_ordering_row_major_h_before_v(self, jr0):
        # T10 = (3,3,1,2) clashes with itself both ways.
        vs = check_validity(Patch((0, 0), 2, 2, [10, 10, 10, 10]), jr0)
        kinds = [(v.position, v.axis) for v in vs]
        assert kinds == [
            ((0, 0), HORIZONTAL),
            ((0, 0), VERTICAL),
            ((1, 0), VERTICAL),
            ((0, 1), HORIZONTAL),
        ]
        assert vs[0].colors == (3, 1) and vs[1].colors == (3, 2)

    def test_validity_invariant_under_shift(self, jr0):
        patch = Patch((0, 0), 2, 1, [0, 1])
        for n in [(3, -2), (-1, 5), (0, 0)]:
            assert check_validity(shift_patch(patch, n), jr0) == []


class TestShift:
    def test_identity(self):
        p = Patch((0, 0), 2, 2, [1, 2, 3, 4])
        assert shift_patch(p, (0, 0)) == p

    def test_translation(self):
        p = Patch((0, 0), 2, 2, [1, 2, 3, 4])
        q = shift_patch(p, (2, 3))
        assert q.origin == (2, 3)
        assert q.cells == p.cells
        assert q.get(2, 3) == 1 and q.get(3, 4) == 4

    def test_composition(self):
        p = Patch((5, 7), 3, 1, [1, 2, 3])
        assert shift_patch(shift_patch(p, (1, 0)), (-1, 0)) == p
        assert shift_patch(shift_patch(p, (2, 3)), (4, -1)) == shift_patch(p, (6, 2))


class TestConfigDistance:
    def _pair(self, cells_a, cells_b, w=5, h=5, origin=(-2, -2)):
        return (Patch(origin, w, h, cells_a), Patch(origin, w, h, cells_b))

    def test_identical(self):
        a, b = self._pair([0] * 25, [0] * 25)
        d = config_distance(a, b)
        assert d.value == 0 and d.agrees_on_window

    def test_differ_at_origin(self):
        cells = [0] * 25
        cells2 = list(cells)
        cells2[2 * 5 + 2] = 1  # position (0,0)
        a, b = self._pair(cells, cells2)
        d = config_distance(a, b)
        assert d.value == 1 and not d.agrees_on_window

    def test_differ_at_chebyshev_2(self):
        # agree on the 3x3 square around the origin, differ at (2,1)
        cells = [0] * 25
        cells2 = list(cells)
        cells2[(1 + 2) * 5 + (2 + 2)] = 1
        a, b = self._pair(cells, cells2)
        assert config_distance(a, b).value == Fraction(1, 4)

    def test_symmetry_and_ultrametric(self):
        import random

        rng = random.Random(7)
        patches = [
            Patch((-2, -2), 5, 5, [rng.randrange(3) for _ in range(25)])
            for _ in range(12)
        ]
        for x in patches:
            for y in patches:
                dxy = config_distance(x, y).value
                assert dxy == config_distance(y, x).value
                for z in patches:
                    dxz = config_distance(x, z).value
                    dzy = config_distance(z, y).value
                    assert dxy <= max(dxz, dzy)

    def test_no_common_window(self):
        a = Patch((0, 0), 2, 2, [0, 0, 0, 0])
        b = Patch((10, 10), 2, 2, [0, 0, 0, 0])
        with pytest.raises(NoCommonWindowError):
            config_distance(a, b)
        # overlapping but not containing the origin
        c = Patch((1, 1), 2, 2, [0, 0, 0, 0])
        with pytest.raises(NoCommonWindowError):
            config_distance(a, c)


class TestPatchIO:
    def test_roundtrip_with_name(self):
        p = Patch((1, -2), 3, 2, [0, 1, 2, UNASSIGNED, 4, 5])
        text = patch_to_json(p, protoset_name="jr0")
        q, inline, name = patch_from_json(text)
        assert q == p and inline is None and name == "jr0"

    def test_roundtrip_inline(self, jr0):
        p = Patch((0, 0), 2, 1, [0, 1])
        text = patch_to_json(p, protoset=jr0)
        q, inline, _ = patch_from_json(text)
        assert q == p and inline == jr0

    def test_canonical_bytes_stable(self):
        p = Patch((0, 0), 2, 1, [0, 1])
        assert patch_to_json(p) == patch_to_json(p)
        assert patch_to_json(p).endswith("\n")
