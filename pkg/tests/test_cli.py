import json

import numpy as np
import pytest

from witgen.bench import free_core_formula
from witgen.cli import main


@pytest.fixture
def cnf(tmp_path):
    path = tmp_path / "f.cnf"
    path.write_text(free_core_formula(4, 6, np.random.default_rng(0)).to_dimacs())
    return path


def _sample_lines(capsys):
    out = capsys.readouterr()
    return out.out.split(), out.err


@pytest.mark.parametrize("algorithm", ["uniwit", "bgp", "xorsample", "xorsample-prime"])
def test_sample_prints_one_line_per_run(cnf, capsys, algorithm):
    assert main(["sample", "--algorithm", algorithm, "--input", str(cnf), "--runs", "6", "--k", "2", "--seed", "3"]) == 0
    lines, err = _sample_lines(capsys)
    assert len(lines) == 6
    assert all(l == "-" or (len(l) == 10 and set(l) <= {"0", "1"}) for l in lines)
    assert "runs succeeded" in err


def test_sample_is_reproducible(cnf, capsys):
    args = ["sample", "--algorithm", "uniwit", "--input", str(cnf), "--runs", "5", "--seed", "11"]
    main(args)
    first, _ = _sample_lines(capsys)
    main(args)
    second, _ = _sample_lines(capsys)
    assert first == second


def test_log_report_round_trip(cnf, tmp_path, capsys):
    log = tmp_path / "run.log"
    cache = tmp_path / "lf.txt"
    main(["sample", "--algorithm", "uniwit", "--input", str(cnf), "--runs", "12", "--warmup", "4",
          "--log", str(log), "--leapfrog-cache", str(cache)])
    capsys.readouterr()
    fields = cache.read_text().split()
    assert fields[1:3] == ["uniwit", "3"] and int(fields[3]) >= 0
    assert main(["report", "--log", str(log), "--oracle-count", "16", "--out", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["runs"] == 12 and report["oracle_count"] == 16
    assert main(["report", "--log", str(log), "--out", "csv"]) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert header.startswith("algorithm,param,runs,successes")
    assert row.startswith("uniwit,3,12,")


def test_random_file_and_exhaustion(cnf, tmp_path, capsys):
    rand = tmp_path / "bits.bin"
    rand.write_bytes(bytes(range(256)) * 4)
    assert main(["sample", "--algorithm", "uniwit", "--input", str(cnf), "--random-file", str(rand)]) == 0
    short = tmp_path / "short.bin"
    short.write_bytes(b"\x01")
    assert main(["sample", "--algorithm", "uniwit", "--input", str(cnf), "--random-file", str(short), "--runs", "50"]) == 4


def test_deadline_exit_code(tmp_path, capsys):
    path = tmp_path / "big.cnf"
    path.write_text("p cnf 22 0\n")
    code = main(["sample", "--algorithm", "xorsample-prime", "--input", str(path), "--s", "0",
                 "--deadline", "0.05", "--runs", "3"])
    assert code == 3
    assert "deadline" in capsys.readouterr().err


def test_external_solver_flag(cnf, fake_solver, capsys):
    assert main(["sample", "--algorithm", "xorsample", "--input", str(cnf), "--s", "4",
                 "--solver", fake_solver, "--runs", "2"]) == 0
    lines, _ = _sample_lines(capsys)
    assert len(lines) == 2


def test_bad_input(tmp_path, capsys):
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 2 1\n3 0\n")
    assert main(["sample", "--algorithm", "uniwit", "--input", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["sample", "--algorithm", "uniwit", "--input", str(bad), "--seed", "1", "--random-file", "x"])
