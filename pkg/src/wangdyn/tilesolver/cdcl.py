"""Driver around the CDCL kernel: setup, resumable chunks, timeouts.

The kernel runs in fixed conflict-budget chunks with all state held in
numpy arrays, so wall-clock timeout checks between chunks never change
the search itself: identical request + seed gives an identical patch.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..wangcore import Patch
from . import _kernels as K
from .encode import Cnf, SolveRequest, decode_assignment, encode_cnf

CONFLICT_CHUNK = 20_000
LUBY_BASE = 128


class SolveTimeoutError(TimeoutError):
    pass


@dataclass
class SolveResult:
    status: str  # "sat" | "unsat"
    patch: Optional[Patch] = None
    stats: dict = field(default_factory=dict)


class CdclSolver:
    """Deterministic CDCL on a fixed CNF; seed only jitters initial order."""

    def __init__(self, cnf: Cnf, seed: int = 0):
        self.nvars = cnf.num_vars
        nv = self.nvars
        sizes = np.diff(cnf.starts)
        lits = cnf.lits.astype(np.int64)
        kern = np.where(lits > 0, 2 * (lits - 1), 2 * (-lits - 1) + 1)

        clause_of_lit = np.repeat(np.arange(len(sizes)), sizes)
        big = sizes >= 2
        pool0 = kern[big[clause_of_lit]].astype(np.int32)
        big_sizes = sizes[big]
        ncls = len(big_sizes)

        self.trivially_unsat = bool((sizes == 0).any())
        self.units = kern[cnf.starts[:-1][sizes == 1]].astype(np.int32)

        pool_cap = len(pool0) + max(100_000, len(pool0) // 2) + nv + 4
        cls_cap = ncls + max(20_000, ncls // 2)
        self.pool = np.zeros(pool_cap, dtype=np.int32)
        self.pool[: len(pool0)] = pool0
        self.cbase = np.zeros(cls_cap, dtype=np.int64)
        self.csize = np.zeros(cls_cap, dtype=np.int32)
        if ncls:
            self.cbase[:ncls] = np.concatenate(([0], np.cumsum(big_sizes)[:-1]))
            self.csize[:ncls] = big_sizes
        self.cdead = np.zeros(cls_cap, dtype=np.uint8)
        self.clbd = np.zeros(cls_cap, dtype=np.int32)

        self.whead = np.full(2 * nv, -1, dtype=np.int64)
        self.wnext = np.full(2 * cls_cap, -1, dtype=np.int64)
        self.wcls = np.zeros(2 * cls_cap, dtype=np.int64)

        self.assigns = np.full(nv, -1, dtype=np.int8)
        self.levels = np.zeros(nv, dtype=np.int64)
        self.reasons = np.full(nv, -1, dtype=np.int64)
        self.trail = np.zeros(nv + 1, dtype=np.int64)
        self.trail_lim = np.zeros(nv + 2, dtype=np.int64)
        self.polarity = np.zeros(nv, dtype=np.int8)
        self.seen = np.zeros(nv, dtype=np.uint8)
        self.out_learnt = np.zeros(nv + 2, dtype=np.int64)
        self.to_clear = np.zeros(nv + 2, dtype=np.int64)
        self.lbd_stamp = np.zeros(nv + 2, dtype=np.int64)

        rng = np.random.default_rng(seed)
        self.act = rng.random(nv) * 1e-9
        self.heap = np.zeros(nv, dtype=np.int64)
        self.hpos = np.full(nv, -1, dtype=np.int64)
        self.hsize = 0
        for v in range(nv):
            self.hsize = K._heap_insert(self.heap, self.hpos, self.act,
                                        self.hsize, v)

        self.meta = np.zeros(16, dtype=np.int64)
        self.meta[K.M_NCLS] = ncls
        self.meta[K.M_POOL] = len(pool0)
        self.meta[K.M_FIRSTLEARN] = ncls
        self.fmeta = np.zeros(4, dtype=np.float64)
        self.fmeta[K.F_VARINC] = 1.0
        self.fmeta[K.F_MAXLEARN] = 20_000 + 0.1 * ncls

        K._init_watches(self.pool, self.cbase, self.csize, self.whead,
                        self.wnext, self.wcls, ncls)

    def _grow(self):
        pool_cap = len(self.pool) * 2
        self.pool = np.resize(self.pool, pool_cap)
        cls_cap = len(self.cbase) * 2
        for name in ("cbase", "clbd"):
            setattr(self, name, np.resize(getattr(self, name), cls_cap))
        self.csize = np.resize(self.csize, cls_cap)
        self.cdead = np.resize(self.cdead, cls_cap)
        # node ids 2c+k are preserved; only capacity changes
        old_n = len(self.wnext)
        wnext = np.full(2 * cls_cap, -1, dtype=np.int64)
        wnext[:old_n] = self.wnext
        wcls = np.zeros(2 * cls_cap, dtype=np.int64)
        wcls[:old_n] = self.wcls
        self.wnext, self.wcls = wnext, wcls

    def _enqueue_initial_units(self) -> bool:
        for lit in self.units:
            v = int(lit) >> 1
            want = (int(lit) & 1) ^ 1
            if self.assigns[v] == -1:
                K._enqueue(int(lit), -1, self.assigns, self.levels,
                           self.reasons, self.trail, self.meta)
            elif self.assigns[v] != want:
                return False
        return True

    def solve(self, timeout_s: float = 600.0) -> tuple[str, Optional[np.ndarray]]:
        if self.trivially_unsat or not self._enqueue_initial_units():
            return "unsat", None
        deadline = time.monotonic() + timeout_s
        while True:
            status, self.hsize = K._search(
                self.pool, self.cbase, self.csize, self.cdead, self.clbd,
                self.whead, self.wnext, self.wcls, self.assigns, self.levels,
                self.reasons, self.trail, self.trail_lim, self.meta,
                self.fmeta, self.act, self.heap, self.hpos, self.hsize,
                self.polarity, self.seen, self.out_learnt, self.to_clear,
                self.lbd_stamp, CONFLICT_CHUNK, len(self.pool),
                len(self.cbase), LUBY_BASE)
            if status == K.STATUS_SAT:
                return "sat", self.assigns.copy()
            if status == K.STATUS_UNSAT:
                return "unsat", None
            if status == K.STATUS_GROW:
                self._grow()
            if time.monotonic() > deadline:
                raise SolveTimeoutError(
                    f"solve exceeded {timeout_s:.0f}s "
                    f"({int(self.meta[K.M_CONFL])} conflicts)")

    def stats(self) -> dict:
        return {
            "conflicts": int(self.meta[K.M_CONFL]),
            "decisions": int(self.meta[K.M_DECISIONS]),
            "restarts": int(self.meta[K.M_RESTARTS]),
            "learned_alive": int(self.meta[K.M_ALIVELEARN]),
            "clauses": int(self.meta[K.M_NCLS]),
        }


def solve_patch(request: SolveRequest, cnf: Optional[Cnf] = None) -> SolveResult:
    """Solve the window with the internal engine; UNSAT is a value."""
    if request.engine != "internal":
        raise ValueError(f"solve_patch handles engine='internal', "
                         f"not {request.engine!r}")
    if cnf is None:
        cnf = encode_cnf(request)
    solver = CdclSolver(cnf, seed=request.seed)
    status, assigns = solver.solve(timeout_s=request.timeout_s)
    if status == "unsat":
        return SolveResult("unsat", None, solver.stats())
    true_vars = (np.nonzero(assigns == 1)[0] + 1).tolist()
    patch = decode_assignment(request, true_vars)
    return SolveResult("sat", patch, solver.stats())
