"""CNF formulas, XOR constraints and their DIMACS encodings.

Variables are 1-based throughout, as in DIMACS.  A total assignment is a
tuple of bits where position ``p - 1`` holds the value of variable ``p``.
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np


class DimacsError(ValueError):
    """Malformed DIMACS input; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError(f"num_vars must be positive, got {self.num_vars}")
        clauses = tuple(tuple(int(lit) for lit in c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        for idx, clause in enumerate(clauses):
            if not clause:
                raise ValueError(f"clause {idx} is empty")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(
                        f"literal {lit} in clause {idx} out of range 1..{self.num_vars}"
                    )

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment: Sequence[int]) -> bool:
        for clause in self.clauses:
            for lit in clause:
                if (assignment[abs(lit) - 1] == 1) == (lit > 0):
                    break
            else:
                return False
        return True

    def to_dimacs(self) -> str:
        return emit_extended_dimacs(AugmentedFormula(self, ()))

    @cached_property
    def fingerprint(self) -> str:
        """Content hash of the canonical DIMACS bytes."""
        return hashlib.sha256(self.to_dimacs().encode("ascii")).hexdigest()[:16]

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat clause arrays for the search engine: ``(lits, starts)``.

        Repeated literals are merged and tautologies dropped here only; the
        data model itself keeps every clause as parsed.
        """
        lits: list[int] = []
        starts = [0]
        for clause in self.clauses:
            uniq = list(dict.fromkeys(clause))
            if any(-lit in uniq for lit in uniq):
                continue
            lits.extend(uniq)
            starts.append(len(lits))
        return (
            np.asarray(lits, dtype=np.int32),
            np.asarray(starts, dtype=np.int32),
        )


@dataclass(frozen=True)
class XorConstraint:
    """Parity equation ``xor(vars) == rhs``.  Empty ``vars`` is allowed."""

    vars: frozenset[int]
    rhs: int

    def __post_init__(self):
        if type(self.vars) is not frozenset:
            object.__setattr__(self, "vars", frozenset(int(v) for v in self.vars))
        if self.rhs not in (0, 1):
            raise ValueError(f"rhs must be 0 or 1, got {self.rhs}")
        if self.vars and min(self.vars) < 1:
            raise ValueError("xor variables must be positive indices")

    def satisfied_by(self, assignment: Sequence[int]) -> bool:
        parity = 0
        for v in self.vars:
            parity ^= assignment[v - 1]
        return parity == self.rhs

    @property
    def is_vacuous(self) -> bool:
        return not self.vars and self.rhs == 0


@dataclass(frozen=True)
class AugmentedFormula:
    """A CNF formula conjoined with XOR constraints."""

    base: CnfFormula
    xors: tuple[XorConstraint, ...] = ()

    def __post_init__(self):
        xors = tuple(self.xors)
        object.__setattr__(self, "xors", xors)
        for x in xors:
            if x.vars and max(x.vars) > self.base.num_vars:
                raise ValueError(
                    f"xor mentions variable {max(x.vars)} > num_vars {self.base.num_vars}"
                )

    @property
    def num_vars(self) -> int:
        return self.base.num_vars

    def satisfied_by(self, assignment: Sequence[int]) -> bool:
        return self.base.satisfied_by(assignment) and all(
            x.satisfied_by(assignment) for x in self.xors
        )

    def conjoin(self, xors: Iterable[XorConstraint]) -> "AugmentedFormula":
        return AugmentedFormula(self.base, self.xors + tuple(xors))


@dataclass(frozen=True)
class Witness:
    bits: tuple[int, ...]

    def __post_init__(self):
        if type(self.bits) is not tuple:
            object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @classmethod
    def from_string(cls, text: str) -> "Witness":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit-string: {text!r}")
        return cls(tuple(1 if ch == "1" else 0 for ch in text))

    def literals(self) -> list[int]:
        return [p if b else -p for p, b in enumerate(self.bits, start=1)]


def as_augmented(f: CnfFormula | AugmentedFormula) -> AugmentedFormula:
    return f if isinstance(f, AugmentedFormula) else AugmentedFormula(f, ())


def xor_to_cnf(x: XorConstraint, fresh_var_base: int) -> tuple[list[list[int]], int]:
    """Encode ``x`` as CNF by chaining 2-input parities through fresh variables.

    Returns ``(clauses, aux_count)``.  Auxiliary variables are numbered from
    ``fresh_var_base`` upward; ``max(0, len(vars) - 2)`` of them are used.
    An empty constraint with rhs 1 yields the empty clause.
    """
    vs = sorted(x.vars)
    k = len(vs)
    if k == 0:
        return ([[]] if x.rhs else []), 0
    if k == 1:
        return [[vs[0] if x.rhs else -vs[0]]], 0

    clauses: list[list[int]] = []
    acc = vs[0]
    aux = fresh_var_base
    for v in vs[1:-1]:
        # aux <-> acc xor v
        clauses.append([-aux, acc, v])
        clauses.append([-aux, -acc, -v])
        clauses.append([aux, -acc, v])
        clauses.append([aux, acc, -v])
        acc = aux
        aux += 1
    last = vs[-1]
    if x.rhs:
        clauses.append([acc, last])
        clauses.append([-acc, -last])
    else:
        clauses.append([acc, -last])
        clauses.append([-acc, last])
    return clauses, aux - fresh_var_base


def _read_text(text: str | TextIO) -> str:
    return text if isinstance(text, str) else text.read()


def _parse(text: str, allow_xor: bool) -> AugmentedFormula:
    num_vars = num_decl = None
    clauses: list[tuple[int, ...]] = []
    xors: list[XorConstraint] = []
    pending: list[int] = []
    pending_line = 0
    lineno = 0

    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise DimacsError("duplicate header", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed header {line!r}", lineno)
            try:
                num_vars, num_decl = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed header {line!r}", lineno) from None
            if num_vars < 1 or num_decl < 0:
                raise DimacsError(f"malformed header {line!r}", lineno)
            continue
        if num_vars is None:
            raise DimacsError("clause before header", lineno)

        if line.startswith("x"):
            if not allow_xor:
                raise DimacsError("xor line in plain CNF input", lineno)
            if pending:
                raise DimacsError("xor line inside an unterminated clause", lineno)
            xors.append(_parse_xor_line(line[1:], num_vars, lineno))
            continue

        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"bad token {tok!r}", lineno) from None
            if lit == 0:
                if not pending:
                    raise DimacsError("empty clause", lineno)
                clauses.append(tuple(pending))
                pending = []
                continue
            if abs(lit) > num_vars:
                raise DimacsError(f"literal {lit} out of range 1..{num_vars}", lineno)
            if not pending:
                pending_line = lineno
            pending.append(lit)

    if num_vars is None:
        raise DimacsError("missing header 'p cnf <vars> <clauses>'", lineno or None)
    if pending:
        raise DimacsError("missing clause terminator 0", pending_line)
    found = len(clauses) + len(xors)
    if found != num_decl:
        raise DimacsError(f"header declares {num_decl} clauses, found {found}", lineno)
    return AugmentedFormula(CnfFormula(num_vars, tuple(clauses)), tuple(xors))


def _parse_xor_line(body: str, num_vars: int, lineno: int) -> XorConstraint:
    toks = body.split()
    if not toks or toks[-1] != "0":
        raise DimacsError("missing xor terminator 0", lineno)
    rhs = 1
    vs: set[int] = set()
    for tok in toks[:-1]:
        try:
            lit = int(tok)
        except ValueError:
            raise DimacsError(f"bad token {tok!r}", lineno) from None
        if lit == 0 or abs(lit) > num_vars:
            raise DimacsError(f"literal {lit} out of range 1..{num_vars}", lineno)
        if lit < 0:
            rhs ^= 1
        # x xor x cancels
        vs ^= {abs(lit)}
    return XorConstraint(frozenset(vs), rhs)


def parse_dimacs(text: str | TextIO) -> CnfFormula:
    """Parse standard DIMACS CNF; raises :class:`DimacsError` with a line number."""
    return _parse(_read_text(text), allow_xor=False).base


def parse_extended_dimacs(text: str | TextIO) -> AugmentedFormula:
    """Parse DIMACS CNF with ``x``-prefixed parity lines."""
    return _parse(_read_text(text), allow_xor=True)


def emit_extended_dimacs(f: AugmentedFormula, extra_clauses: Iterable[Sequence[int]] = ()) -> str:
    """Write ``f`` as DIMACS, one ``x`` line per non-vacuous XOR constraint.

    An ``x`` line asserts that its literals xor to true; a leading negated
    literal flips that to false.  ``xor(empty) == 0`` holds trivially and is
    not written; ``xor(empty) == 1`` is written as the bare line ``x 0``.
    """
    extra = [list(c) for c in extra_clauses]
    xors = [x for x in f.xors if not x.is_vacuous]
    out = [f"p cnf {f.base.num_vars} {len(f.base.clauses) + len(extra) + len(xors)}"]
    for clause in list(f.base.clauses) + extra:
        out.append(" ".join(map(str, clause)) + " 0")
    for x in xors:
        vs = sorted(x.vars)
        if not vs:
            out.append("x 0")
            continue
        if x.rhs == 0:
            vs[0] = -vs[0]
        out.append("x" + " ".join(map(str, vs)) + " 0")
    return "\n".join(out) + "\n"
