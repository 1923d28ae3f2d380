"""Regenerate the frozen registry data under src/wangdyn/data/.

Runs the discovery pipeline end to end with pinned seeds:

  penrose24 -> solve 40x40 -> pull back through diag(phi, phi) -> infer
  P24 (24 atoms; validated by consistency and an exact refinement round
  trip against the published tile listing);

  P16: erase the slope-1 boundaries of P24, recover the 16 Wang tiles
  from the adjacency structure, translate the frame so the origin sits
  on a four-slope crossing and the published q-anchors hold, and relabel
  canonically (atom 0 = the (phi-1)^2 atom, q's two sides = atoms 13/12,
  tile 12 renamed to colors (6,2,4,1)).

Usage:  python3 scripts/build_registry.py [--out src/wangdyn/data]
"""

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from wangdyn.goldfield import Golden, GPoint, PHI, mod1
from wangdyn.discovery import infer_partition, pullback_dots
from wangdyn.partition import (
    Atom,
    Partition,
    consistency_check,
    derive_wang_structure,
    merge_atoms_across_slope,
    partition_to_json,
    reduce_cell,
    refine_side_partitions,
    side_partitions_from,
    _key_slope,
)
from wangdyn.registry import get_lattice, get_protoset
from wangdyn.tilesolver import SolveRequest, solve_patch
from wangdyn.torusdyn import reduce_mod_lattice
from wangdyn.wangcore import Protoset, canonical_json
from wangdyn.geometry import regions_equal_area, simplify_region

P24_SEED = 0
P24_SIZE = 40


def build_p24(out_dir: Path) -> Partition:
    ps = get_protoset("penrose24")
    lat = get_lattice("gamma24")
    print(f"solving penrose24 {P24_SIZE}x{P24_SIZE} (seed {P24_SEED})...")
    t0 = time.time()
    res = solve_patch(SolveRequest(ps, P24_SIZE, P24_SIZE, seed=P24_SEED))
    assert res.status == "sat"
    print(f"  sat in {time.time() - t0:.0f}s")
    dots = pullback_dots(res.patch, lat.basis, source=f"penrose24-{P24_SIZE}-s{P24_SEED}")
    slopes = [Golden(0), Golden(1), None, PHI, PHI - 1]
    part = infer_partition(dots, slopes)
    assert len(part.atoms) == 24, len(part.atoms)
    rep = consistency_check(part, ps)
    assert rep.ok, rep.violations
    p_r, p_b = side_partitions_from(part, ps)
    refined, tiles = refine_side_partitions(p_r, p_b)
    assert sorted(tiles) == sorted(tuple(t) for t in ps.tiles)
    for atom, tup in zip(refined.atoms, tiles):
        orig = ps.tiles.index(tup)
        assert regions_equal_area(atom.cells, part.atom_region(orig))
    (out_dir / "partition_p24.json").write_text(partition_to_json(part))
    print("  p24 validated and written")
    return part


def build_p16(out_dir: Path, p24: Partition):
    lat = p24.lattice
    merged = merge_atoms_across_slope(p24, Golden(1))
    assert len(merged.atoms) == 16

    # frame translation: move a four-slope boundary crossing to the origin
    # such that q = (1/2, (3/2)phi - 1) lands on a slope-phi segment whose
    # two sides can carry the published tile-12 anchor.
    shift = _paper_frame_shift(merged)
    atoms = []
    for atom in merged.atoms:
        cells = []
        for cell in atom.cells:
            cells.extend(reduce_cell(cell.translate(-shift), lat))
        atoms.append(Atom(atom.label, simplify_region(cells)))
    framed = Partition(lat, atoms)

    tiles = derive_wang_structure(framed)
    q = GPoint(Golden(Fraction(1, 2)), Golden(-1, Fraction(3, 2)))
    tq = reduce_mod_lattice(q, lat)
    minus_atom = framed.locate_with_direction(tq, GPoint(1, -1))
    plus_atom = framed.locate_with_direction(tq, GPoint(-1, 1))
    area_atom = next(a.label for a in framed.atoms if a.area() == Golden(2, -1))
    assert len({minus_atom, plus_atom, area_atom}) == 3

    # relabel: area anchor -> 0, q sides -> 12 (against v) and 13 (with v)
    relabel = {area_atom: 0, minus_atom: 12, plus_atom: 13}
    rest = [a.label for a in framed.atoms if a.label not in relabel]
    free = [i for i in range(16) if i not in (0, 12, 13)]
    relabel.update(dict(zip(rest, free)))

    # rename colors so tile 12 reads (6, 2, 4, 1)
    t12 = tiles[minus_atom]
    hmap = _rename_colors(
        {t[0] for t in tiles} | {t[2] for t in tiles}, {t12[0]: 6, t12[2]: 4})
    vmap = _rename_colors(
        {t[1] for t in tiles} | {t[3] for t in tiles}, {t12[1]: 2, t12[3]: 1})
    out_tiles = [None] * 16
    out_atoms = [None] * 16
    for atom in framed.atoms:
        new = relabel[atom.label]
        r, t, l, b = tiles[atom.label]
        out_tiles[new] = (hmap[r], vmap[t], hmap[l], vmap[b])
        out_atoms[new] = Atom(new, atom.cells)
    ammann16 = Protoset(out_tiles, name="ammann16")
    p16 = Partition(lat, out_atoms)
    rep = consistency_check(p16, ammann16)
    assert rep.ok, rep.violations
    p_r, p_b = side_partitions_from(p16, ammann16)
    refined, rtiles = refine_side_partitions(p_r, p_b)
    assert sorted(rtiles) == sorted(out_tiles)
    (out_dir / "partition_p16.json").write_text(partition_to_json(p16))
    (out_dir / "protoset_ammann16.json").write_text(
        canonical_json([list(t) for t in out_tiles]))
    print("  p16 + ammann16 validated and written")


def _paper_frame_shift(merged: Partition) -> GPoint:
    lat = merged.lattice
    binv = lat.basis_inv
    incident = {}
    for key, _u, _v, pu, pv, _labels in merged.boundary_pieces():
        slope = _key_slope(key)
        token = "inf" if slope is None else str(slope)
        for pt in (pu, pv):
            cc = binv.mul_point(pt)
            incident.setdefault((mod1(cc.x), mod1(cc.y)), set()).add(token)
    q = GPoint(Golden(Fraction(1, 2)), Golden(-1, Fraction(3, 2)))
    tiles = derive_wang_structure(merged)
    for (c1, c2), slopes in sorted(incident.items(),
                                   key=lambda kv: (float(kv[0][0]), float(kv[0][1]))):
        if len(slopes) < 4:
            continue
        shift = lat.g1.scale(c1) + lat.g2.scale(c2)
        tq = reduce_mod_lattice(q + shift, lat)
        try:
            minus_atom = merged.locate_with_direction(tq, GPoint(1, -1))
        except Exception:
            continue
        loc = merged.point_locate(tq)
        if not hasattr(loc, "labels"):
            continue
        r, t, l, b = tiles[minus_atom]
        if r != l and t != b:
            return shift
    raise RuntimeError("no admissible frame shift found")


def _rename_colors(colors, pinned: dict) -> dict:
    mapping = dict(pinned)
    used = set(mapping.values())
    free = [c for c in range(len(colors) + len(used) + 2) if c not in used]
    for c in sorted(colors):
        if c not in mapping:
            mapping[c] = free.pop(0)
    return mapping


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent
                                         / "src" / "wangdyn" / "data"))
    args = ap.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    p24 = build_p24(out_dir)
    build_p16(out_dir, p24)
    print("done")


if __name__ == "__main__":
    main()
