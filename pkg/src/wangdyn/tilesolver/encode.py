"""Direct CNF encoding of finite Wang tiling windows.

Variable map: v(x, y, t) = (y*W + x)*|T| + t + 1 (DIMACS numbering).
Canonical clause order: at-least-one per cell (row-major), pairwise
at-most-one per cell, horizontally forbidden pairs per adjacency,
vertically forbidden pairs, then preassignment units.  Satisfying
assignments correspond exactly to valid fully-assigned patches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from ..wangcore import Patch, Protoset


class InconsistentModelError(ValueError):
    """Model assigns zero or several tiles to some cell."""


@dataclass(frozen=True)
class SolveRequest:
    protoset: Protoset
    width: int
    height: int
    preassigned: Mapping[tuple[int, int], int] = field(default_factory=dict)
    engine: str = "internal"  # internal | dimacs-export | dimacs-import
    seed: int = 0
    timeout_s: float = 600.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("window dimensions must be positive")
        n = len(self.protoset)
        for (x, y), t in self.preassigned.items():
            if not (0 <= x < self.width and 0 <= y < self.height):
                raise ValueError(f"preassigned cell ({x},{y}) outside window")
            if not (0 <= t < n):
                raise ValueError(f"preassigned tile {t} out of range")

    def var(self, x: int, y: int, t: int) -> int:
        return (y * self.width + x) * len(self.protoset) + t + 1

    def num_vars(self) -> int:
        return self.width * self.height * len(self.protoset)


@dataclass(frozen=True)
class Cnf:
    """Clause list in canonical order, stored flat for scale."""

    num_vars: int
    lits: np.ndarray  # int32, concatenated signed DIMACS literals
    starts: np.ndarray  # int64, clause start offsets, len = nclauses + 1

    @property
    def num_clauses(self) -> int:
        return len(self.starts) - 1

    def clause(self, i: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.lits[self.starts[i]:self.starts[i + 1]])

    def iter_clauses(self) -> Iterator[tuple[int, ...]]:
        for i in range(self.num_clauses):
            yield self.clause(i)

    def validate(self):
        if len(self.lits) and (self.lits == 0).any():
            raise ValueError("zero literal in CNF")
        if len(self.lits) and int(np.abs(self.lits).max()) > self.num_vars:
            raise ValueError("literal exceeds declared variable count")


def encode_cnf(request: SolveRequest) -> Cnf:
    """Build the canonical CNF for the request (vectorised construction)."""
    w, h, nt = request.width, request.height, len(request.protoset)
    ncells = w * h
    bases = np.arange(ncells, dtype=np.int64) * nt  # cell -> first var - 1

    blocks: list[np.ndarray] = []
    sizes: list[np.ndarray] = []

    # at-least-one per cell
    alo = bases[:, None] + np.arange(1, nt + 1, dtype=np.int64)[None, :]
    blocks.append(alo.ravel())
    sizes.append(np.full(ncells, nt, dtype=np.int64))

    # pairwise at-most-one per cell
    t1, t2 = np.triu_indices(nt, k=1)
    pair_pat = np.stack([t1, t2], axis=1).astype(np.int64) + 1  # (P,2)
    amo = -(bases[:, None, None] + pair_pat[None, :, :])
    blocks.append(amo.ravel())
    sizes.append(np.full(ncells * len(pair_pat), 2, dtype=np.int64))

    horiz, vert = request.protoset.forbidden_pairs()

    def adjacency_block(pairs, a_cells, b_cells):
        if not pairs or len(a_cells) == 0:
            return
        pk = np.array(sorted(pairs), dtype=np.int64) + 1  # (F,2), 1-based tiles
        a = bases[a_cells][:, None] + pk[:, 0][None, :]  # (A,F)
        b = bases[b_cells][:, None] + pk[:, 1][None, :]
        block = -np.stack([a, b], axis=2)  # (A,F,2)
        blocks.append(block.ravel())
        sizes.append(np.full(a.size, 2, dtype=np.int64))

    cell_ids = np.arange(ncells, dtype=np.int64).reshape(h, w)
    adjacency_block(horiz, cell_ids[:, :-1].ravel(), cell_ids[:, 1:].ravel())
    adjacency_block(vert, cell_ids[:-1, :].ravel(), cell_ids[1:, :].ravel())

    units = [
        request.var(x, y, t)
        for (y, x), t in sorted(((y, x), t) for (x, y), t in request.preassigned.items())
    ]
    if units:
        blocks.append(np.array(units, dtype=np.int64))
        sizes.append(np.ones(len(units), dtype=np.int64))

    lits = np.concatenate(blocks).astype(np.int32)
    starts = np.zeros(sum(len(s) for s in sizes) + 1, dtype=np.int64)
    np.cumsum(np.concatenate(sizes), out=starts[1:])
    cnf = Cnf(request.num_vars(), lits, starts)
    cnf.validate()
    return cnf


def decode_assignment(request: SolveRequest, true_vars) -> Patch:
    """Patch from the set of true variables; every cell must get one tile."""
    w, h, nt = request.width, request.height, len(request.protoset)
    cells = [-2] * (w * h)  # -2 = unset marker distinct from UNASSIGNED
    for v in true_vars:
        v0 = v - 1
        cell, t = divmod(v0, nt)
        if not (0 <= cell < w * h):
            raise InconsistentModelError(f"variable {v} outside window")
        if cells[cell] != -2:
            raise InconsistentModelError(
                f"cell {cell % w, cell // w} assigned both tile "
                f"{cells[cell]} and {t}"
            )
        cells[cell] = t
    missing = [i for i, c in enumerate(cells) if c == -2]
    if missing:
        i = missing[0]
        raise InconsistentModelError(f"cell {(i % w, i // w)} has no tile")
    return Patch((0, 0), w, h, cells)
