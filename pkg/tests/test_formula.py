import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from witgen.formula import (
    AugmentedFormula,
    CnfFormula,
    DimacsError,
    Witness,
    XorConstraint,
    emit_extended_dimacs,
    parse_dimacs,
    parse_extended_dimacs,
    xor_to_cnf,
)


def assignments(n):
    return itertools.product((0, 1), repeat=n)


def cnf_models(num_vars, clauses):
    f = CnfFormula(num_vars, tuple(tuple(c) for c in clauses)) if clauses and all(clauses) else None
    out = []
    for y in assignments(num_vars):
        if any(not c for c in clauses):
            continue
        if f is None or f.satisfied_by(y):
            out.append(y)
    return out


# --- parsing -------------------------------------------------------------

def test_parse_minimal():
    f = parse_dimacs("p cnf 2 1\n1 -2 0")
    assert f.num_vars == 2
    assert f.clauses == ((1, -2),)


def test_parse_comments_and_multiline_clause():
    f = parse_dimacs("c hello\np cnf 3 2\n1 2\n 3 0 -1 0\n")
    assert f.clauses == ((1, 2, 3), (-1,))


@pytest.mark.parametrize("text, line, fragment", [
    ("p cnf 2 1\n3 0", 2, "range"),
    ("p cnf 2 1\n1 2", 2, "terminat"),
    ("p cnf 2 x\n1 0", 1, "header"),
    ("1 2 0\np cnf 2 1", 1, "header"),
    ("p cnf 2 2\n1 0", None, "declares"),
    ("p cnf 2 1\n0", 2, "empty"),
])
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(DimacsError) as e:
        parse_dimacs(text)
    if line is not None:
        assert e.value.line == line
    assert fragment in str(e.value).lower()


def test_plain_parser_rejects_xor_lines():
    with pytest.raises(DimacsError):
        parse_dimacs("p cnf 2 1\nx1 2 0\n")


def test_tautologies_are_kept():
    f = parse_dimacs("p cnf 2 1\n1 -1 2 0\n")
    assert f.clauses == ((1, -1, 2),)
    assert parse_dimacs(f.to_dimacs()) == f


def test_invariants_enforced():
    with pytest.raises(ValueError):
        CnfFormula(2, ((),))
    with pytest.raises(ValueError):
        CnfFormula(2, ((3,),))
    with pytest.raises(ValueError):
        XorConstraint(frozenset({0}), 1)


def test_fingerprint_is_content_hash():
    a = CnfFormula(3, ((1, 2), (-3,)))
    b = parse_dimacs(a.to_dimacs())
    c = CnfFormula(3, ((1, 2), (3,)))
    assert a.fingerprint == b.fingerprint != c.fingerprint


# --- xor_to_cnf ----------------------------------------------------------

def test_xor_single_var():
    clauses, aux = xor_to_cnf(XorConstraint(frozenset({1}), 1), 2)
    assert clauses == [[1]] and aux == 0


def test_xor_two_vars_rhs0():
    clauses, aux = xor_to_cnf(XorConstraint(frozenset({1, 2}), 0), 3)
    assert sorted(map(sorted, clauses)) == [[-2, 1], [-1, 2]]
    assert aux == 0


def test_xor_empty():
    assert xor_to_cnf(XorConstraint(frozenset(), 0), 1) == ([], 0)
    assert xor_to_cnf(XorConstraint(frozenset(), 1), 1) == ([[]], 0)


def _projection(x: XorConstraint, n: int):
    clauses, aux = xor_to_cnf(x, n + 1)
    return {y[:n] for y in cnf_models(n + aux, clauses)}, aux


def test_xor_three_vars_odd_parity():
    proj, aux = _projection(XorConstraint(frozenset({1, 2, 3}), 1), 3)
    assert proj == {y for y in assignments(3) if sum(y) % 2 == 1}
    assert len(proj) == 4 and aux == 1


@settings(max_examples=80, deadline=None)
@given(st.sets(st.integers(1, 6), max_size=6), st.integers(0, 1))
def test_xor_to_cnf_projection_equivalence(vs, rhs):
    x = XorConstraint(frozenset(vs), rhs)
    proj, aux = _projection(x, 6)
    assert proj == {y for y in assignments(6) if x.satisfied_by(y)}
    assert aux == max(0, len(vs) - 2)


def test_xor_encoding_has_unique_aux_extension():
    # each solution of the xor extends to exactly one model of the encoding
    x = XorConstraint(frozenset({1, 2, 3, 4}), 0)
    clauses, aux = xor_to_cnf(x, 5)
    models = cnf_models(4 + aux, clauses)
    assert len(models) == 8


# --- extended DIMACS -----------------------------------------------------

def test_emit_xor_lines():
    base = CnfFormula(2, ())
    assert "x1 2 0" in emit_extended_dimacs(AugmentedFormula(base, (XorConstraint(frozenset({1, 2}), 1),))).splitlines()
    assert "x-1 2 0" in emit_extended_dimacs(AugmentedFormula(base, (XorConstraint(frozenset({1, 2}), 0),))).splitlines()


def test_emit_header_counts_and_blocking_clauses():
    f = AugmentedFormula(CnfFormula(3, ((1, 2),)), (XorConstraint(frozenset({2, 3}), 1),))
    text = emit_extended_dimacs(f, [[-1, -2, -3]])
    lines = [l for l in text.splitlines() if not l.startswith("c")]
    assert lines[0] == "p cnf 3 3"
    g = parse_extended_dimacs(text)
    assert g.base.clauses == ((1, 2), (-1, -2, -3))
    assert g.xors == f.xors


def test_parse_xor_negations_flip_rhs():
    g = parse_extended_dimacs("p cnf 3 1\nx-1 -2 3 0\n")
    assert g.xors == (XorConstraint(frozenset({1, 2, 3}), 1),)
    g = parse_extended_dimacs("p cnf 3 1\nx1 1 2 0\n")
    assert g.xors == (XorConstraint(frozenset({2}), 1),)


def test_round_trip_ten_xors():
    import random
    rnd = random.Random(4)
    base = CnfFormula(8, tuple(tuple(rnd.choice((-1, 1)) * v for v in rnd.sample(range(1, 9), 3)) for _ in range(6)))
    xors = tuple(XorConstraint(frozenset(rnd.sample(range(1, 9), rnd.randint(1, 8))), rnd.randint(0, 1)) for _ in range(10))
    f = AugmentedFormula(base, xors)
    g = parse_extended_dimacs(emit_extended_dimacs(f))
    assert g.base == f.base
    assert g.xors == f.xors


clause_st = st.lists(st.integers(1, 5).flatmap(lambda v: st.sampled_from((v, -v))), min_size=1, max_size=4)
xor_st = st.builds(lambda vs, r: XorConstraint(frozenset(vs), r), st.sets(st.integers(1, 5), min_size=1), st.integers(0, 1))


@settings(max_examples=60, deadline=None)
@given(st.lists(clause_st, max_size=6), st.lists(xor_st, max_size=4))
def test_round_trip_property(clauses, xors):
    f = AugmentedFormula(CnfFormula(5, tuple(map(tuple, clauses))), tuple(xors))
    g = parse_extended_dimacs(emit_extended_dimacs(f))
    assert g == f


@settings(max_examples=40, deadline=None)
@given(st.lists(clause_st, max_size=6), st.lists(xor_st, max_size=3))
def test_augmented_solution_set(clauses, xors):
    base = CnfFormula(5, tuple(map(tuple, clauses)))
    f = AugmentedFormula(base, tuple(xors))
    for y in assignments(5):
        assert f.satisfied_by(y) == (base.satisfied_by(y) and all(x.satisfied_by(y) for x in xors))


def test_witness_string_forms():
    w = Witness.from_string("1001")
    assert str(w) == "1001"
    assert w.literals() == [1, -2, -3, 4]
