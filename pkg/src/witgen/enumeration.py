"""Bounded witness enumeration and exact model counting.

``bounded_sat(f, r)`` returns ``min(r, #f)`` distinct witnesses of a CNF+XOR
formula, found one after another by blocking each total assignment that has
been seen.  Two backends implement it:

* :class:`InternalBackend` translates XOR constraints to CNF and runs the
  compiled DPLL in :mod:`witgen._engine`.  Its enumeration order is the
  lexicographic order of assignments (variable 1 most significant, 0 < 1).
* :class:`ExternalSolverBackend` drives any DIMACS solver executable that
  understands ``x`` lines, adding one blocking clause per call.
"""

from __future__ import annotations

import os
import subprocess
import tempfile
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _engine
from .formula import AugmentedFormula, CnfFormula, Witness, as_augmented, emit_extended_dimacs

UNBOUNDED = 1 << 62
_STEP_CHUNK = 50_000


class SolveTimeout(RuntimeError):
    """One enumeration call exceeded its per-call timeout."""


class DeadlineExceeded(RuntimeError):
    """The overall deadline passed; the caller should give up the run."""


class SolverError(RuntimeError):
    """The external solver produced unusable output."""


@dataclass(frozen=True)
class SolveBudget:
    """Per-call timeout in seconds and an optional absolute ``time.monotonic()`` deadline."""

    per_call_timeout: float = 3000.0
    deadline: float | None = None

    def __post_init__(self):
        if self.per_call_timeout <= 0:
            raise ValueError("per_call_timeout must be positive")

    @classmethod
    def with_overall(cls, per_call_timeout: float = 3000.0, overall: float | None = None) -> "SolveBudget":
        deadline = None if overall is None else time.monotonic() + overall
        return cls(per_call_timeout, deadline)

    def call_deadline(self) -> tuple[float, bool]:
        """Earliest stop time for a call starting now, and whether it is the overall one."""
        now = time.monotonic()
        if self.deadline is not None and now >= self.deadline:
            raise DeadlineExceeded("overall deadline exceeded")
        stop = now + self.per_call_timeout
        if self.deadline is not None and self.deadline <= stop:
            return self.deadline, True
        return stop, False


DEFAULT_BUDGET = SolveBudget()


@dataclass(frozen=True)
class WitnessSet:
    witnesses: tuple[Witness, ...]
    truncated: bool

    def __len__(self) -> int:
        return len(self.witnesses)

    def __iter__(self):
        return iter(self.witnesses)

    def __getitem__(self, i):
        return self.witnesses[i]


def _timed_out(overall: bool):
    if overall:
        raise DeadlineExceeded("overall deadline exceeded during enumeration")
    raise SolveTimeout("enumeration call exceeded its per-call timeout")


def build_clause_arrays(f: AugmentedFormula) -> tuple[np.ndarray, np.ndarray, int]:
    """CNF for the search engine: base clauses followed by the XOR chains.

    The chains are exactly :func:`formula.xor_to_cnf` applied in order with
    fresh variables from ``n + 1``.  Returns ``(lits, starts, total_vars)``.
    """
    base_lits, base_starts = f.base.csr
    n = f.base.num_vars
    if not f.xors:
        return base_lits, base_starts, n
    xvars: list[int] = []
    xstarts = [0]
    for x in f.xors:
        xvars.extend(sorted(x.vars))
        xstarts.append(len(xvars))
    return _engine.encode_xor_chains(
        base_lits, base_starts, n,
        np.asarray(xvars, dtype=np.int32),
        np.asarray(xstarts, dtype=np.int32),
        np.asarray([x.rhs for x in f.xors], dtype=np.int32),
    )


class InternalBackend:
    name = "internal"

    def enumerate(self, f: AugmentedFormula, limit: int, budget: SolveBudget, record: bool = True):
        """Run the engine; returns ``(rows, found, truncated)``."""
        stop, overall = budget.call_deadline()
        lits, starts, nvars = build_clause_arrays(f)
        search = _engine.Search(lits, starts, nvars, f.num_vars, limit, record=record)
        chunks = []
        while True:
            status = search.step(_STEP_CHUNK)
            if record:
                rows = search.drain()
                if len(rows):
                    chunks.append(rows)
            if status != _engine.PAUSED:
                break
            if time.monotonic() >= stop:
                _timed_out(overall)
        rows = np.concatenate(chunks) if chunks else np.zeros((0, f.num_vars), dtype=np.int8)
        return rows, search.found, status == _engine.LIMIT


class ExternalSolverBackend:
    """Repeated calls to an external solver, one blocking clause per witness.

    The solver is run as ``[solver, *args, path]`` on an extended-DIMACS file
    and must print ``s SATISFIABLE`` / ``s UNSATISFIABLE`` and ``v`` lines.
    """

    name = "external"

    def __init__(self, solver: str | os.PathLike, args: Sequence[str] = ()):
        self.solver = os.fspath(solver)
        self.args = list(args)

    def solve_once(self, f: AugmentedFormula, blocking: Sequence[Sequence[int]], timeout: float):
        with tempfile.TemporaryDirectory(prefix="witgen-") as tmp:
            path = os.path.join(tmp, "query.cnf")
            with open(path, "w", encoding="ascii") as fh:
                fh.write(emit_extended_dimacs(f, blocking))
            try:
                proc = subprocess.run(
                    [self.solver, *self.args, path],
                    capture_output=True, text=True, timeout=max(timeout, 1e-3),
                )
            except subprocess.TimeoutExpired:
                return "timeout", None
        return parse_solver_output(proc.stdout, f.num_vars)

    def enumerate(self, f: AugmentedFormula, limit: int, budget: SolveBudget, record: bool = True):
        stop, overall = budget.call_deadline()
        found: list[tuple[int, ...]] = []
        blocking: list[list[int]] = []
        while len(found) < limit:
            remaining = stop - time.monotonic()
            if remaining <= 0:
                _timed_out(overall)
            status, model = self.solve_once(f, blocking, remaining)
            if status == "timeout":
                _timed_out(overall)
            if status == "unsat":
                break
            if not f.satisfied_by(model):
                raise SolverError("solver returned an assignment that violates the formula")
            found.append(model)
            blocking.append([-lit for lit in Witness(model).literals()])
        rows = np.asarray(found, dtype=np.int8).reshape(len(found), f.num_vars)
        return rows, len(found), len(found) == limit


def parse_solver_output(text: str, num_vars: int):
    """Read ``s``/``v`` lines.  Returns ``("sat", bits)`` or ``("unsat", None)``.

    Variables the model leaves out default to 0; the caller checks the
    completed assignment against the formula.
    """
    status = None
    values: dict[int, int] = {}
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = "sat"
            elif word == "UNSATISFIABLE":
                status = "unsat"
            else:
                raise SolverError(f"unexpected status line {line!r}")
        elif line.startswith("v "):
            for tok in line[2:].split():
                lit = int(tok)
                if lit != 0 and abs(lit) <= num_vars:
                    values[abs(lit)] = 1 if lit > 0 else 0
    if status is None:
        raise SolverError("solver printed no status line")
    if status == "unsat":
        return "unsat", None
    return "sat", tuple(values.get(p, 0) for p in range(1, num_vars + 1))


_DEFAULT_BACKEND = InternalBackend()


def _rows_to_witnesses(rows: np.ndarray) -> tuple[Witness, ...]:
    return tuple(Witness(tuple(r)) for r in rows.tolist())


def bounded_sat(f: CnfFormula | AugmentedFormula, limit: int,
                budget: SolveBudget = DEFAULT_BUDGET, backend=None) -> WitnessSet:
    """Up to ``limit`` distinct witnesses; ``truncated`` records that the limit was hit."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    backend = backend or _DEFAULT_BACKEND
    rows, _, truncated = backend.enumerate(as_augmented(f), limit, budget)
    return WitnessSet(_rows_to_witnesses(rows), truncated)


def model_count(f: CnfFormula | AugmentedFormula,
                budget: SolveBudget = DEFAULT_BUDGET, backend=None) -> int:
    backend = backend or _DEFAULT_BACKEND
    _, found, _ = backend.enumerate(as_augmented(f), UNBOUNDED, budget, record=False)
    return found


def nth_witness(f: CnfFormula | AugmentedFormula, i: int,
                budget: SolveBudget = DEFAULT_BUDGET, backend=None) -> Witness:
    """The ``i``-th witness (1-based) in the backend's enumeration order."""
    if i < 1:
        raise IndexError("witness index is 1-based")
    ws = bounded_sat(f, i, budget, backend)
    if len(ws) < i:
        raise IndexError(f"formula has only {len(ws)} witnesses, asked for #{i}")
    return ws[i - 1]
