"""Test-instance generators with known witness counts."""

from __future__ import annotations

import numpy as np

from ..formula import CnfFormula
from .oracles import brute_force_rows


def random_3cnf(n: int, num_clauses: int, rng: np.random.Generator) -> CnfFormula:
    """Uniform random 3-CNF: three distinct variables per clause, fair signs."""
    if n < 3:
        raise ValueError("random 3-CNF needs n >= 3")
    clauses = []
    for _ in range(num_clauses):
        vs = rng.choice(n, size=3, replace=False) + 1
        signs = rng.integers(0, 2, size=3) * 2 - 1
        clauses.append(tuple(int(v * s) for v, s in zip(vs, signs)))
    return CnfFormula(n, tuple(clauses))


def random_3cnf_with_count(n: int, target: int, rng: np.random.Generator,
                           attempts: int = 1000, stall: int = 500) -> CnfFormula:
    """Random 3-CNF with exactly ``target`` witnesses.

    Clauses are drawn at random and kept only if the surviving witness set
    stays at or above ``target``; the truth-table oracle tracks the count.
    After ``stall`` useless draws in a row the attempt starts over.
    """
    if not 1 <= target <= 1 << n:
        raise ValueError("target count out of range")
    everything = brute_force_rows(CnfFormula(n, ()))
    for _ in range(attempts):
        rows, clauses, idle = everything, [], 0
        while rows.shape[0] > target and idle < stall:
            (clause,) = random_3cnf(n, 1, rng).clauses
            keep = np.zeros(rows.shape[0], dtype=bool)
            for lit in clause:
                keep |= rows[:, abs(lit) - 1] == (1 if lit > 0 else 0)
            survivors = int(keep.sum())
            if target <= survivors < rows.shape[0]:
                rows, idle = rows[keep], 0
                clauses.append(clause)
            else:
                idle += 1
        if rows.shape[0] == target:
            return CnfFormula(n, tuple(clauses))
    raise RuntimeError(f"could not reach exactly {target} witnesses")


def free_core_formula(free: int, dependent: int, rng: np.random.Generator) -> CnfFormula:
    """Formula with exactly ``2**free`` witnesses.

    ``free`` variables are unconstrained; each of the ``dependent`` others is
    forced to the AND or OR of two earlier variables (Tseitin-style clauses).
    Variable positions are shuffled so the free ones are spread out.
    """
    if free < 0 or dependent < 0 or (dependent and free < 2):
        raise ValueError("bad free/dependent sizes")
    n = free + dependent
    perm = (rng.permutation(n) + 1).tolist()
    clauses = []
    for j in range(free, n):
        d = perm[j]
        a, b = (perm[int(t)] for t in rng.choice(j, size=2, replace=False))
        a = a if rng.integers(2) else -a
        b = b if rng.integers(2) else -b
        if rng.integers(2):
            # d <-> a & b
            clauses += [(-d, a), (-d, b), (d, -a, -b)]
        else:
            # d <-> a | b
            clauses += [(d, -a), (d, -b), (-d, a, b)]
    return CnfFormula(n, tuple(clauses))
