import io
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from witgen.bench import (
    MAX_ORACLE_VARS,
    ExperimentParams,
    FrequencyTable,
    OracleTooLarge,
    brute_force_count,
    brute_force_witnesses,
    chi_square_uniform,
    coverage,
    fraction_at_least,
    free_core_formula,
    n_unif,
    random_3cnf,
    random_3cnf_with_count,
    report_from_log,
    run_experiment,
    scaled_variance,
)
from witgen.entropy import SeededBitSource
from witgen.formula import CnfFormula
from witgen.samplers import LeapfrogCache


def test_oracle_empty_clause_set():
    ws = brute_force_witnesses(CnfFormula(3, ()))
    assert [str(w) for w in ws] == ["000", "001", "010", "011", "100", "101", "110", "111"]


def test_oracle_contradiction():
    assert len(brute_force_witnesses(CnfFormula(1, ((1,), (-1,))))) == 0


def test_oracle_cap():
    with pytest.raises(OracleTooLarge):
        brute_force_witnesses(CnfFormula(MAX_ORACLE_VARS + 1, ()))


def test_oracle_against_itertools():
    import itertools
    f = random_3cnf(9, 30, np.random.default_rng(0))
    expected = [y for y in itertools.product((0, 1), repeat=9) if f.satisfied_by(y)]
    assert [w.bits for w in brute_force_witnesses(f)] == expected


def test_generators_hit_their_counts():
    rng = np.random.default_rng(1)
    for target in (1, 5, 96, 300):
        assert brute_force_count(random_3cnf_with_count(10, target, rng)) == target
    for free, dep in ((3, 4), (7, 5), (8, 8)):
        f = free_core_formula(free, dep, rng)
        assert f.num_vars == free + dep
        assert brute_force_count(f) == 2 ** free


def test_scaled_variance_examples():
    assert scaled_variance(FrequencyTable({"0": 3, "1": 3, "10": 3})) == 0
    assert scaled_variance(FrequencyTable({"0": 3, "1": 1})) == pytest.approx(1.25e9)
    assert scaled_variance(FrequencyTable({"0": 3, "1": 1}), K=1.0) == pytest.approx(0.125)
    with pytest.raises(ValueError):
        scaled_variance(FrequencyTable({"0": 5}))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 50), min_size=2, max_size=30))
def test_scaled_variance_nonnegative_zero_iff_equal(counts):
    t = FrequencyTable({format(i, "b"): c for i, c in enumerate(counts)})
    v = scaled_variance(t)
    assert v >= 0
    if len(set(counts)) == 1:
        assert v == pytest.approx(0, abs=1e-6)
    else:
        assert v > 0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from(["00", "01", "10", "11"]), min_size=1, max_size=100))
def test_frequency_table_conserves(samples):
    t = FrequencyTable.from_samples(samples)
    assert t.M == len(samples)
    assert sum(t.frequencies().values()) == pytest.approx(1.0)
    assert t.N == len(set(samples))


def test_coverage_metrics():
    t = FrequencyTable({"00": 10, "01": 1, "10": 9})
    assert coverage(t, 4) == 0.75
    assert n_unif(t, 4) == 5.0
    assert n_unif(t) == 20 / 3
    assert fraction_at_least(t, 5.0 / 8, 4) == 0.75
    assert fraction_at_least(t, 2, 4) == 0.5
    res = chi_square_uniform(t, 4)
    assert res.statistic == pytest.approx(((10 - 5) ** 2 + 16 + 16 + 25) / 5)


def test_run_experiment_one_witness():
    f = CnfFormula(3, ((1,), (2,), (-3,)))
    r = run_experiment(f, "uniwit", ExperimentParams(k=1), 1, SeededBitSource(0), oracle_count=1)
    assert r.successes == 1 and r.runs == 1
    assert r.coverage == 1.0
    assert r.scaled_variance is None


@pytest.mark.parametrize("algorithm", ["uniwit", "bgp", "xorsample", "xorsample-prime"])
def test_log_reproduces_report(algorithm):
    f = free_core_formula(5, 4, np.random.default_rng(3))
    log = io.StringIO()
    params = ExperimentParams(k=2, warmup=5)
    r = run_experiment(f, algorithm, params, 25, SeededBitSource(1), oracle_count=32, log=log)
    again = report_from_log(log.getvalue(), oracle_count=32)
    assert again == r
    assert json.loads(again.to_json()) == json.loads(r.to_json())
    assert again.to_csv() == r.to_csv()
    assert r.successes <= r.runs
    if r.i_min is not None:
        assert r.i_min <= r.i_max


def test_leapfrog_protocol_phases():
    f = free_core_formula(6, 6, np.random.default_rng(4))
    log = io.StringIO()
    cache = LeapfrogCache()
    run_experiment(f, "uniwit", ExperimentParams(k=2, warmup=10), 30, SeededBitSource(2), cache=cache, log=log)
    phases = [line.split()[3] for line in log.getvalue().splitlines() if not line.startswith("#")]
    assert phases == ["warmup"] * 10 + ["leapfrog"] * 20
    key = (f.fingerprint, "uniwit", "2")
    idx = [int(line.split()[1]) for line in log.getvalue().splitlines()
           if not line.startswith("#") and line.split()[0] != "-"]
    assert cache.get(key) == min(idx)
    # a warm cache skips the warm-up
    log2 = io.StringIO()
    run_experiment(f, "uniwit", ExperimentParams(k=2, warmup=10), 5, SeededBitSource(3), cache=cache, log=log2)
    assert all(line.endswith("leapfrog") for line in log2.getvalue().splitlines() if not line.startswith("#"))
    log3 = io.StringIO()
    run_experiment(f, "uniwit", ExperimentParams(k=2, leapfrog=False), 5, SeededBitSource(3), log=log3)
    assert all(line.endswith("plain") for line in log3.getvalue().splitlines() if not line.startswith("#"))


def test_leapfrog_on_s():
    f = free_core_formula(7, 3, np.random.default_rng(5))
    cache = LeapfrogCache()
    log = io.StringIO()
    run_experiment(f, "xorsample-prime", ExperimentParams(q=0.5, warmup=4), 10, SeededBitSource(2), cache=cache, log=log)
    rows = [line.split() for line in log.getvalue().splitlines() if not line.startswith("#")]
    s_post = {int(r[1]) for r in rows[4:]}
    assert s_post == {cache.get((f.fingerprint, "xorsample-prime", "0.5"))}


def test_fixed_s_is_not_leapfrogged():
    f = free_core_formula(7, 3, np.random.default_rng(5))
    log = io.StringIO()
    run_experiment(f, "xorsample-prime", ExperimentParams(q=0.5, s=3), 5, SeededBitSource(2), log=log)
    assert all(line.split()[1:2] == ["3"] and line.endswith("plain")
               for line in log.getvalue().splitlines() if not line.startswith("#"))


def test_failed_s_search_is_a_failed_run():
    # with q = 0 no xor ever shrinks the count, so no s can be chosen
    f = CnfFormula(6, ())
    r = run_experiment(f, "xorsample-prime", ExperimentParams(q=0.0, warmup=2), 4, SeededBitSource(0))
    assert r.successes == 0 and r.runs == 4


def test_bad_inputs():
    f = CnfFormula(2, ())
    with pytest.raises(ValueError):
        run_experiment(f, "nope", ExperimentParams(), 1, SeededBitSource(0))
    with pytest.raises(ValueError):
        run_experiment(f, "uniwit", ExperimentParams(), 0, SeededBitSource(0))
    with pytest.raises(ValueError):
        report_from_log("0 1 0.1 plain\n")
