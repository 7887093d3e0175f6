"""Truth-table ground truth for small formulas.

Deliberately shares no code with the search engine: every assignment is
evaluated against the clause list with numpy.
"""

from __future__ import annotations

import numpy as np

from ..enumeration import WitnessSet
from ..formula import AugmentedFormula, CnfFormula, Witness

MAX_ORACLE_VARS = 24
_CHUNK = 1 << 16


class OracleTooLarge(ValueError):
    pass


def _assignment_block(n: int, lo: int, hi: int) -> np.ndarray:
    # row r is the assignment whose integer value (variable 1 = MSB) is lo + r
    vals = np.arange(lo, hi, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((vals[:, None] >> shifts) & 1).astype(np.int8)


def _satisfying_mask(f: AugmentedFormula, block: np.ndarray) -> np.ndarray:
    ok = np.ones(block.shape[0], dtype=bool)
    for clause in f.base.clauses:
        sat = np.zeros(block.shape[0], dtype=bool)
        for lit in clause:
            col = block[:, abs(lit) - 1]
            sat |= (col == 1) if lit > 0 else (col == 0)
        ok &= sat
    for x in f.xors:
        par = np.zeros(block.shape[0], dtype=np.int8)
        for v in x.vars:
            par ^= block[:, v - 1]
        ok &= par == x.rhs
    return ok


def brute_force_rows(f: CnfFormula | AugmentedFormula) -> np.ndarray:
    """All witnesses as an int8 array, in increasing integer order."""
    g = f if isinstance(f, AugmentedFormula) else AugmentedFormula(f)
    n = g.num_vars
    if n > MAX_ORACLE_VARS:
        raise OracleTooLarge(f"truth-table oracle is capped at {MAX_ORACLE_VARS} variables, got {n}")
    parts = []
    total = 1 << n
    for lo in range(0, total, _CHUNK):
        block = _assignment_block(n, lo, min(total, lo + _CHUNK))
        parts.append(block[_satisfying_mask(g, block)])
    return np.concatenate(parts) if parts else np.zeros((0, n), dtype=np.int8)


def brute_force_witnesses(f: CnfFormula | AugmentedFormula) -> WitnessSet:
    rows = brute_force_rows(f)
    return WitnessSet(tuple(Witness(tuple(r)) for r in rows.tolist()), truncated=False)


def brute_force_count(f: CnfFormula | AugmentedFormula) -> int:
    return int(brute_force_rows(f).shape[0])
