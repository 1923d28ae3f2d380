"""Conflict-driven clause-learning search kernel.

Array-only state so the same source runs under numba @njit or as plain
Python (see wangdyn.accel).  Literal encoding: lit = 2*var + (0 positive,
1 negative), variables 0-based.  Watches are intrusive singly-linked
lists; each clause owns nodes 2c and 2c+1 forever, so moving a watch
never allocates.

meta slots (int64): 0 qhead, 1 trail_len, 2 level, 3 nclauses,
4 pool_len, 5 conflicts, 6 restart_count, 7 first_learned,
8 alive_learned, 9 decisions, 10 lbd_stamp_counter
fmeta slots (float64): 0 var_inc, 1 max_learnts
"""

import numpy as np

from ..accel import maybe_jit

STATUS_SAT = 0
STATUS_UNSAT = 1
STATUS_BUDGET = 2
STATUS_GROW = 3

M_QHEAD = 0
M_TRAIL = 1
M_LEVEL = 2
M_NCLS = 3
M_POOL = 4
M_CONFL = 5
M_RESTARTS = 6
M_FIRSTLEARN = 7
M_ALIVELEARN = 8
M_DECISIONS = 9
M_STAMP = 10
M_SINCERESTART = 11

F_VARINC = 0
F_MAXLEARN = 1

VAR_DECAY_INV = 1.0 / 0.95


@maybe_jit
def _heap_better(act, a, b):
    if act[a] != act[b]:
        return act[a] > act[b]
    return a < b


@maybe_jit
def _heap_up(heap, hpos, act, i):
    x = heap[i]
    while i > 0:
        p = (i - 1) >> 1
        if _heap_better(act, x, heap[p]):
            heap[i] = heap[p]
            hpos[heap[p]] = i
            i = p
        else:
            break
    heap[i] = x
    hpos[x] = i


@maybe_jit
def _heap_down(heap, hpos, act, hsize, i):
    x = heap[i]
    while True:
        left = 2 * i + 1
        if left >= hsize:
            break
        right = left + 1
        child = left
        if right < hsize and _heap_better(act, heap[right], heap[left]):
            child = right
        if _heap_better(act, heap[child], x):
            heap[i] = heap[child]
            hpos[heap[child]] = i
            i = child
        else:
            break
    heap[i] = x
    hpos[x] = i


@maybe_jit
def _heap_insert(heap, hpos, act, hsize, v):
    if hpos[v] >= 0:
        return hsize
    heap[hsize] = v
    hpos[v] = hsize
    _heap_up(heap, hpos, act, hsize)
    return hsize + 1


@maybe_jit
def _heap_pop(heap, hpos, act, hsize):
    v = heap[0]
    hpos[v] = -1
    hsize -= 1
    if hsize > 0:
        heap[0] = heap[hsize]
        hpos[heap[hsize]] = 0
        _heap_down(heap, hpos, act, hsize, 0)
    return v, hsize


@maybe_jit
def _var_bump(v, act, heap, hpos, fmeta):
    act[v] += fmeta[F_VARINC]
    if act[v] > 1e100:
        for i in range(len(act)):
            act[i] *= 1e-100
        fmeta[F_VARINC] *= 1e-100
    if hpos[v] >= 0:
        _heap_up(heap, hpos, act, hpos[v])


@maybe_jit
def _enqueue(lit, reason_cls, assigns, levels, reasons, trail, meta):
    v = lit >> 1
    assigns[v] = (lit & 1) ^ 1
    levels[v] = meta[M_LEVEL]
    reasons[v] = reason_cls
    trail[meta[M_TRAIL]] = lit
    meta[M_TRAIL] += 1


@maybe_jit
def _lit_value(lit, assigns):
    # 1 true, 0 false, -1 unassigned
    a = assigns[lit >> 1]
    if a < 0:
        return -1
    return a ^ (lit & 1)


@maybe_jit
def _propagate(pool, cbase, csize, cdead, whead, wnext, wcls,
               assigns, levels, reasons, trail, meta):
    """Unit propagation; returns conflicting clause id or -1."""
    while meta[M_QHEAD] < meta[M_TRAIL]:
        p = trail[meta[M_QHEAD]]
        meta[M_QHEAD] += 1
        false_lit = p ^ 1
        prev = -1
        n = whead[false_lit]
        while n != -1:
            c = wcls[n]
            nxt = wnext[n]
            if cdead[c] != 0:
                if prev == -1:
                    whead[false_lit] = nxt
                else:
                    wnext[prev] = nxt
                n = nxt
                continue
            base = cbase[c]
            if pool[base] == false_lit:
                pool[base] = pool[base + 1]
                pool[base + 1] = false_lit
            first = pool[base]
            if _lit_value(first, assigns) == 1:
                prev = n
                n = nxt
                continue
            moved = False
            end = base + csize[c]
            for k in range(base + 2, end):
                q = pool[k]
                if _lit_value(q, assigns) != 0:
                    pool[base + 1] = q
                    pool[k] = false_lit
                    if prev == -1:
                        whead[false_lit] = nxt
                    else:
                        wnext[prev] = nxt
                    wnext[n] = whead[q]
                    whead[q] = n
                    moved = True
                    break
            if moved:
                n = nxt
                continue
            if _lit_value(first, assigns) == 0:
                meta[M_QHEAD] = meta[M_TRAIL]
                return c
            _enqueue(first, c, assigns, levels, reasons, trail, meta)
            prev = n
            n = nxt
    return -1


@maybe_jit
def _analyze(confl, pool, cbase, csize, assigns, levels, reasons, trail, meta,
             seen, out_learnt, to_clear, lbd_stamp, act, heap, hpos, fmeta):
    """First-UIP learning with basic minimisation.

    Returns (learnt_len, backtrack_level, lbd); the asserting literal is
    out_learnt[0] and the second watch (highest remaining level) is
    out_learnt[1] when learnt_len > 1.
    """
    cur_level = meta[M_LEVEL]
    path_count = 0
    p = -1
    idx = meta[M_TRAIL] - 1
    out_len = 1
    nclear = 0
    while True:
        base = cbase[confl]
        start = base if p == -1 else base + 1
        end = base + csize[confl]
        for k in range(start, end):
            q = pool[k]
            v = q >> 1
            if seen[v] == 0 and levels[v] > 0:
                seen[v] = 1
                to_clear[nclear] = v
                nclear += 1
                _var_bump(v, act, heap, hpos, fmeta)
                if levels[v] >= cur_level:
                    path_count += 1
                else:
                    out_learnt[out_len] = q
                    out_len += 1
        while seen[trail[idx] >> 1] == 0:
            idx -= 1
        p = trail[idx]
        v = p >> 1
        confl = reasons[v]
        seen[v] = 0  # stays in to_clear; harmless
        idx -= 1
        path_count -= 1
        if path_count <= 0:
            break
    out_learnt[0] = p ^ 1

    # basic minimisation: drop lits whose whole reason is already seen
    j = 1
    for i in range(1, out_len):
        q = out_learnt[i]
        v = q >> 1
        r = reasons[v]
        keep = True
        if r != -1:
            keep = False
            base = cbase[r]
            end = base + csize[r]
            for k in range(base, end):
                w = pool[k] >> 1
                if w != v and seen[w] == 0 and levels[w] > 0:
                    keep = True
                    break
        if keep:
            out_learnt[j] = q
            j += 1
    out_len = j

    # place the highest-level remaining literal at position 1
    bt_level = 0
    if out_len > 1:
        max_i = 1
        for i in range(2, out_len):
            if levels[out_learnt[i] >> 1] > levels[out_learnt[max_i] >> 1]:
                max_i = i
        tmp = out_learnt[1]
        out_learnt[1] = out_learnt[max_i]
        out_learnt[max_i] = tmp
        bt_level = levels[out_learnt[1] >> 1]

    # LBD: number of distinct decision levels in the learnt clause
    meta[M_STAMP] += 1
    stamp = meta[M_STAMP]
    lbd = 0
    for i in range(out_len):
        lv = levels[out_learnt[i] >> 1]
        if lbd_stamp[lv] != stamp:
            lbd_stamp[lv] = stamp
            lbd += 1

    for i in range(nclear):
        seen[to_clear[i]] = 0
    return out_len, bt_level, lbd


@maybe_jit
def _backtrack(level, assigns, levels, reasons, trail, trail_lim, meta,
               polarity, heap, hpos, act, hsize):
    if meta[M_LEVEL] <= level:
        return hsize
    bound = trail_lim[level]
    for i in range(meta[M_TRAIL] - 1, bound - 1, -1):
        lit = trail[i]
        v = lit >> 1
        polarity[v] = assigns[v]
        assigns[v] = -1
        reasons[v] = -1
        hsize = _heap_insert(heap, hpos, act, hsize, v)
    meta[M_TRAIL] = bound
    meta[M_QHEAD] = bound
    meta[M_LEVEL] = level
    return hsize


@maybe_jit
def _attach_clause(c, pool, cbase, whead, wnext, wcls):
    for k in range(2):
        lit = pool[cbase[c] + k]
        node = 2 * c + k
        wcls[node] = c
        wnext[node] = whead[lit]
        whead[lit] = node


@maybe_jit
def _luby(y, x):
    size = 1
    seq = 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    out = 1
    for _ in range(seq):
        out *= y
    return out


@maybe_jit
def _reduce_db(pool, cbase, csize, cdead, clbd, reasons, assigns, meta):
    """Kill the worse half of the live learned clauses (lazy unlinking)."""
    first = meta[M_FIRSTLEARN]
    ncls = meta[M_NCLS]
    nlive = 0
    for c in range(first, ncls):
        if cdead[c] == 0:
            nlive += 1
    if nlive == 0:
        return
    keys = np.empty(nlive, dtype=np.int64)
    ids = np.empty(nlive, dtype=np.int64)
    i = 0
    for c in range(first, ncls):
        if cdead[c] == 0:
            keys[i] = clbd[c] * 1000000 + csize[c]
            ids[i] = c
            i += 1
    order = np.argsort(keys)
    kill_from = nlive // 2
    killed = 0
    for rank in range(nlive - 1, kill_from - 1, -1):
        c = ids[order[rank]]
        if clbd[c] <= 2:
            continue
        head = pool[cbase[c]]
        v = head >> 1
        if assigns[v] >= 0 and reasons[v] == c:
            continue  # locked: reason of a current assignment
        cdead[c] = 1
        killed += 1
    meta[M_ALIVELEARN] -= killed


@maybe_jit
def _search(pool, cbase, csize, cdead, clbd, whead, wnext, wcls,
            assigns, levels, reasons, trail, trail_lim, meta, fmeta,
            act, heap, hpos, hsize, polarity, seen, out_learnt, to_clear,
            lbd_stamp, budget_conflicts, pool_cap, cls_cap, luby_base):
    """Run CDCL until SAT/UNSAT, conflict budget, or capacity exhaustion.

    Returns (status, hsize); all other state lives in the arrays.
    """
    nvars = len(assigns)
    restart_limit = luby_base * _luby(2, meta[M_RESTARTS])
    conflicts_done = 0
    while True:
        # ensure room for one worst-case learnt clause before propagating
        if meta[M_POOL] + nvars + 2 > pool_cap or meta[M_NCLS] + 1 > cls_cap:
            return STATUS_GROW, hsize
        confl = _propagate(pool, cbase, csize, cdead, whead, wnext, wcls,
                           assigns, levels, reasons, trail, meta)
        if confl >= 0:
            meta[M_CONFL] += 1
            conflicts_done += 1
            meta[M_SINCERESTART] += 1
            if meta[M_LEVEL] == 0:
                return STATUS_UNSAT, hsize
            out_len, bt_level, lbd = _analyze(
                confl, pool, cbase, csize, assigns, levels, reasons, trail,
                meta, seen, out_learnt, to_clear, lbd_stamp, act, heap, hpos,
                fmeta)
            hsize = _backtrack(bt_level, assigns, levels, reasons, trail,
                               trail_lim, meta, polarity, heap, hpos, act,
                               hsize)
            if out_len == 1:
                _enqueue(out_learnt[0], -1, assigns, levels, reasons, trail,
                         meta)
            else:
                c = meta[M_NCLS]
                base = meta[M_POOL]
                cbase[c] = base
                csize[c] = out_len
                cdead[c] = 0
                clbd[c] = lbd
                for i in range(out_len):
                    pool[base + i] = out_learnt[i]
                meta[M_POOL] = base + out_len
                meta[M_NCLS] = c + 1
                meta[M_ALIVELEARN] += 1
                _attach_clause(c, pool, cbase, whead, wnext, wcls)
                _enqueue(out_learnt[0], c, assigns, levels, reasons, trail,
                         meta)
            fmeta[F_VARINC] *= VAR_DECAY_INV
            if meta[M_ALIVELEARN] > fmeta[F_MAXLEARN]:
                _reduce_db(pool, cbase, csize, cdead, clbd, reasons, assigns,
                           meta)
                fmeta[F_MAXLEARN] *= 1.3
            if conflicts_done >= budget_conflicts:
                return STATUS_BUDGET, hsize
        else:
            if meta[M_SINCERESTART] >= restart_limit:
                meta[M_RESTARTS] += 1
                meta[M_SINCERESTART] = 0
                restart_limit = luby_base * _luby(2, meta[M_RESTARTS])
                hsize = _backtrack(0, assigns, levels, reasons, trail,
                                   trail_lim, meta, polarity, heap, hpos,
                                   act, hsize)
                continue
            # pick an unassigned decision variable of top activity
            v = -1
            while hsize > 0:
                v, hsize = _heap_pop(heap, hpos, act, hsize)
                if assigns[v] < 0:
                    break
                v = -1
            if v < 0:
                return STATUS_SAT, hsize
            meta[M_DECISIONS] += 1
            trail_lim[meta[M_LEVEL]] = meta[M_TRAIL]
            meta[M_LEVEL] += 1
            lit = 2 * v + (1 - polarity[v])
            _enqueue(lit, -1, assigns, levels, reasons, trail, meta)


@maybe_jit
def _init_watches(pool, cbase, csize, whead, wnext, wcls, nclauses):
    for c in range(nclauses):
        if csize[c] >= 2:
            _attach_clause(c, pool, cbase, whead, wnext, wcls)
