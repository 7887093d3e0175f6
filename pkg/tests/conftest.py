import stat
import sys
import textwrap

import pytest

from witgen.entropy import FileBitSource

_ACCEPTANCE_LINES: list[str] = []


def bit_source(bits: str, pad_to: int | None = None) -> FileBitSource:
    """In-memory source replaying ``bits`` (zero-padded to a byte boundary)."""
    total = len(bits) if pad_to is None else max(pad_to, len(bits))
    total += -total % 8
    return FileBitSource.from_bits(bits.ljust(total, "0"))


def record_acceptance(line: str) -> None:
    print(line)
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


FAKE_SOLVER = textwrap.dedent("""\
    #!{python}
    # Brute-force stand-in for an xor-aware SAT solver; first model in lexicographic order.
    import itertools, sys
    clauses, xors, n = [], [], 0
    for line in open(sys.argv[-1]):
        t = line.split()
        if not t or t[0] == "c":
            continue
        if t[0] == "p":
            n = int(t[2])
        elif t[0].startswith("x"):
            lits = [int(v) for v in [t[0][1:]] + t[1:] if v][:-1]
            rhs = 1
            for v in lits:
                rhs ^= v < 0
            xors.append(([abs(v) for v in lits], rhs))
        else:
            clauses.append([int(v) for v in t[:-1]])
    for bits in itertools.product((0, 1), repeat=n):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses) and all(
                sum(bits[v - 1] for v in vs) % 2 == r for vs, r in xors):
            print("s SATISFIABLE")
            print("v " + " ".join(str(p if b else -p) for p, b in enumerate(bits, 1)) + " 0")
            break
    else:
        print("s UNSATISFIABLE")
    """)

LYING_SOLVER = textwrap.dedent("""\
    #!{python}
    print("s SATISFIABLE")
    print("v 0")
    """)


def _script(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(body.format(python=sys.executable))
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


@pytest.fixture
def fake_solver(tmp_path):
    return _script(tmp_path, "fake_solver.py", FAKE_SOLVER)


@pytest.fixture
def lying_solver(tmp_path):
    return _script(tmp_path, "lying_solver.py", LYING_SOLVER)
