"""Compiled DPLL core used by the internal enumeration backend.

Plain chronological DPLL with two-watched-literal unit propagation.  The
branching rule is fixed: lowest-index unassigned variable, false first.  All
search state lives in arrays owned by the caller, so a search can be paused
after ``max_steps`` decisions and resumed, which is how wall-clock budgets
are enforced from Python.

Model enumeration: when every variable is assigned, the projection onto the
first ``norig`` variables is emitted and the total assignment is blocked.
The blocking clause is falsified by the current trail, so it acts as a
conflict and forces a chronological backtrack.  After that backtrack the
flipped decision literal satisfies it for the rest of the search (decisions
are always on original variables, because auxiliary variables sit above
them in index order and are fixed by propagation), so the clause never
needs to be stored.
"""

import numpy as np
from numba import njit

EXHAUSTED = 0
LIMIT = 1
PAUSED = 2

# scalar slots in ``sc``
TRAIL_LEN, QHEAD, LEVEL, FOUND, BUFFERED = 0, 1, 2, 3, 4
N_SCALARS = 5


@njit(cache=True)
def _lidx(lit):
    return 2 * lit if lit > 0 else -2 * lit + 1


@njit(cache=True)
def _val(assign, lit):
    # 1 true, 0 false, -1 unassigned
    a = assign[lit if lit > 0 else -lit]
    if a < 0:
        return -1
    if lit > 0:
        return a
    return 1 - a


@njit(cache=True)
def _enqueue(assign, trail, sc, lit):
    assign[lit if lit > 0 else -lit] = 1 if lit > 0 else 0
    trail[sc[TRAIL_LEN]] = lit
    sc[TRAIL_LEN] += 1


@njit(cache=True)
def init_state(lits, starts, assign, trail, wlit, wnext, head, sc):
    """Set up watches and root-level units.  Returns False if trivially unsat."""
    nc = starts.shape[0] - 1
    for c in range(nc):
        s, e = starts[c], starts[c + 1]
        size = e - s
        if size == 0:
            return False
        if size == 1:
            lit = lits[s]
            v = _val(assign, lit)
            if v == 0:
                return False
            if v < 0:
                _enqueue(assign, trail, sc, lit)
            wlit[2 * c] = 0
            wlit[2 * c + 1] = 0
            continue
        for k in range(2):
            lit = lits[s + k]
            w = 2 * c + k
            wlit[w] = lit
            li = _lidx(lit)
            wnext[w] = head[li]
            head[li] = w
    return True


@njit(cache=True)
def _propagate(lits, starts, assign, trail, wlit, wnext, head, sc):
    while sc[QHEAD] < sc[TRAIL_LEN]:
        p = trail[sc[QHEAD]]
        sc[QHEAD] += 1
        false_lit = -p
        fi = _lidx(false_lit)
        prev = -1
        w = head[fi]
        while w != -1:
            nxt = wnext[w]
            c = w >> 1
            other = wlit[w ^ 1]
            if _val(assign, other) == 1:
                prev = w
                w = nxt
                continue
            moved = False
            for j in range(starts[c], starts[c + 1]):
                lit = lits[j]
                if lit != false_lit and lit != other and _val(assign, lit) != 0:
                    wlit[w] = lit
                    if prev == -1:
                        head[fi] = nxt
                    else:
                        wnext[prev] = nxt
                    li = _lidx(lit)
                    wnext[w] = head[li]
                    head[li] = w
                    moved = True
                    break
            if moved:
                w = nxt
                continue
            if _val(assign, other) == 0:
                return False
            _enqueue(assign, trail, sc, other)
            prev = w
            w = nxt
    return True


@njit(cache=True)
def _backtrack(assign, trail, lim, flipped, sc):
    level = sc[LEVEL]
    while level > 0:
        pos = lim[level]
        dec = trail[pos]
        for t in range(pos, sc[TRAIL_LEN]):
            lit = trail[t]
            assign[lit if lit > 0 else -lit] = -1
        sc[TRAIL_LEN] = pos
        if flipped[level] == 0:
            flipped[level] = 1
            sc[QHEAD] = pos
            _enqueue(assign, trail, sc, -dec)
            sc[LEVEL] = level
            return True
        level -= 1
    sc[LEVEL] = 0
    sc[QHEAD] = sc[TRAIL_LEN]
    return False


@njit(cache=True)
def run(lits, starts, nvars, norig, limit, record,
        assign, trail, lim, flipped, wlit, wnext, head, sc, out, max_steps):
    """Continue the search.  Returns EXHAUSTED, LIMIT or PAUSED.

    PAUSED means either ``max_steps`` ran out or ``out`` is full; the caller
    drains ``out[:sc[BUFFERED]]``, resets ``sc[BUFFERED]`` and calls again.
    """
    steps = 0
    while True:
        if steps >= max_steps:
            return PAUSED
        steps += 1
        if not _propagate(lits, starts, assign, trail, wlit, wnext, head, sc):
            if not _backtrack(assign, trail, lim, flipped, sc):
                return EXHAUSTED
            continue
        level = sc[LEVEL]
        v = 1
        if level > 0:
            dec = trail[lim[level]]
            v = dec if dec > 0 else -dec
        while v <= nvars and assign[v] >= 0:
            v += 1
        if v > nvars:
            if record:
                row = sc[BUFFERED]
                if row >= out.shape[0]:
                    return PAUSED
                for p in range(norig):
                    out[row, p] = assign[p + 1]
                sc[BUFFERED] = row + 1
            sc[FOUND] += 1
            if sc[FOUND] >= limit:
                return LIMIT
            if not _backtrack(assign, trail, lim, flipped, sc):
                return EXHAUSTED
            continue
        level += 1
        sc[LEVEL] = level
        lim[level] = sc[TRAIL_LEN]
        flipped[level] = 0
        sc[QHEAD] = sc[TRAIL_LEN]
        _enqueue(assign, trail, sc, -v)


@njit(cache=True)
def encode_xor_chains(base_lits, base_starts, n, xvars, xstarts, xrhs):
    """Append the chained CNF encoding of each XOR to the base clauses.

    Produces exactly the clauses of ``formula.xor_to_cnf`` in the same order,
    with auxiliary variables numbered from ``n + 1``.  Returns
    ``(lits, starts, total_vars)``; an empty XOR with rhs 1 becomes the empty
    clause.
    """
    nb = base_starts.shape[0] - 1
    nx = xstarts.shape[0] - 1
    # at most 4 ternary clauses per inner variable, plus 2 binary
    cap_c = nb
    cap_l = base_lits.shape[0]
    for i in range(nx):
        k = xstarts[i + 1] - xstarts[i]
        cap_c += 4 * k + 2
        cap_l += 12 * k + 4
    lits = np.empty(cap_l, dtype=np.int32)
    starts = np.empty(cap_c + 1, dtype=np.int32)
    lits[:base_lits.shape[0]] = base_lits
    starts[:nb + 1] = base_starts
    nl = base_lits.shape[0]
    ncl = nb
    aux = n + 1
    for i in range(nx):
        s, e = xstarts[i], xstarts[i + 1]
        k = e - s
        rhs = xrhs[i]
        if k == 0:
            if rhs == 1:
                ncl += 1
                starts[ncl] = nl
            continue
        if k == 1:
            v = xvars[s]
            lits[nl] = v if rhs == 1 else -v
            nl += 1
            ncl += 1
            starts[ncl] = nl
            continue
        acc = xvars[s]
        for j in range(s + 1, e - 1):
            v = xvars[j]
            # aux <-> acc xor v
            lits[nl] = -aux; lits[nl + 1] = acc; lits[nl + 2] = v
            lits[nl + 3] = -aux; lits[nl + 4] = -acc; lits[nl + 5] = -v
            lits[nl + 6] = aux; lits[nl + 7] = -acc; lits[nl + 8] = v
            lits[nl + 9] = aux; lits[nl + 10] = acc; lits[nl + 11] = -v
            for t in range(4):
                ncl += 1
                starts[ncl] = nl + 3 * (t + 1)
            nl += 12
            acc = aux
            aux += 1
        last = xvars[e - 1]
        if rhs == 1:
            lits[nl] = acc; lits[nl + 1] = last
            lits[nl + 2] = -acc; lits[nl + 3] = -last
        else:
            lits[nl] = acc; lits[nl + 1] = -last
            lits[nl + 2] = -acc; lits[nl + 3] = last
        starts[ncl + 1] = nl + 2
        starts[ncl + 2] = nl + 4
        ncl += 2
        nl += 4
    return lits[:nl], starts[:ncl + 1], aux - 1


@njit(cache=True)
def start(lits, starts, nvars, norig, limit, record, rows, max_steps):
    """Allocate search state, set up the root and run the first chunk.

    Returns ``(status, state)`` where ``state`` is the tuple of arrays that
    :func:`run` needs to resume a paused search.
    """
    nc = starts.shape[0] - 1
    assign = np.full(nvars + 1, -1, dtype=np.int8)
    trail = np.zeros(nvars + 1, dtype=np.int32)
    lim = np.zeros(nvars + 2, dtype=np.int32)
    flipped = np.zeros(nvars + 2, dtype=np.int8)
    wlit = np.zeros(2 * nc, dtype=np.int32)
    wnext = np.full(2 * nc, -1, dtype=np.int32)
    head = np.full(2 * nvars + 2, -1, dtype=np.int32)
    sc = np.zeros(N_SCALARS, dtype=np.int64)
    out = np.zeros((rows, max(norig, 1)), dtype=np.int8)
    state = (assign, trail, lim, flipped, wlit, wnext, head, sc, out)
    if not init_state(lits, starts, assign, trail, wlit, wnext, head, sc):
        return EXHAUSTED, state
    status = run(lits, starts, nvars, norig, limit, record,
                 assign, trail, lim, flipped, wlit, wnext, head, sc, out, max_steps)
    return status, state


class Search:
    """Resumable search over one clause set (numpy arrays of DIMACS literals)."""

    def __init__(self, lits, starts, nvars, norig, limit, record=True, buffer_rows=4096):
        self.lits = lits
        self.starts = starts
        self.nvars = nvars
        self.norig = norig
        self.limit = limit
        self.record = record
        self.rows = max(1, min(buffer_rows, limit)) if record else 1
        self.state = None

    def step(self, max_steps):
        if self.state is None:
            status, self.state = start(self.lits, self.starts, self.nvars, self.norig,
                                       self.limit, self.record, self.rows, max_steps)
            return status
        return run(self.lits, self.starts, self.nvars, self.norig, self.limit,
                   self.record, *self.state, max_steps)

    def drain(self):
        """Witness rows buffered since the last drain, as an int8 array."""
        sc, out = self.state[7], self.state[8]
        k = int(sc[BUFFERED])
        rows = out[:k].copy()
        sc[BUFFERED] = 0
        return rows

    @property
    def found(self):
        return int(self.state[7][FOUND])
