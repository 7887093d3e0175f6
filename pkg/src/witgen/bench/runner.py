"""Experiment runner, sample logs and run reports.

A sample log starts with ``#`` header lines (``# <key> <value>``) followed by
one line per run::

    <bit-string or -> <terminating index or -> <elapsed seconds> <phase>

where phase is ``warmup`` (before leapfrogging starts), ``leapfrog`` or
``plain`` (leapfrogging off or not applicable).  Reports are computed from
the records alone, so re-reading a log reproduces the report exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from typing import Callable, Iterable, TextIO

from ..enumeration import DEFAULT_BUDGET, SolveBudget
from ..entropy import BitSource
from ..formula import CnfFormula
from ..samplers import (
    LeapfrogCache,
    SampleOutcome,
    SearchFailed,
    UniWitConfig,
    XorSampleConfig,
    bgp,
    estimate_s,
    uniwit,
    xorsample,
    xorsample_prime,
)
from .metrics import (
    FrequencyTable,
    chi_square_uniform,
    coverage,
    fraction_at_least,
    n_unif,
    scaled_variance,
)

ALGORITHMS = ("uniwit", "bgp", "xorsample", "xorsample-prime")
LOG_MAGIC = "witgen-sample-log 1"
DEFAULT_WARMUP = 100


@dataclass
class ExperimentParams:
    k: int = 3
    q: float = 0.5
    s: int | None = None
    family: str = "algebraic"
    max_restarts: int = 100
    budget: SolveBudget = DEFAULT_BUDGET
    warmup: int = DEFAULT_WARMUP
    leapfrog: bool = True


@dataclass(frozen=True)
class RunRecord:
    witness: str | None
    index: int | None
    elapsed: float
    phase: str

    def to_line(self) -> str:
        w = self.witness if self.witness is not None else "-"
        i = str(self.index) if self.index is not None else "-"
        return f"{w} {i} {self.elapsed!r} {self.phase}"

    @classmethod
    def from_line(cls, line: str) -> "RunRecord":
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"malformed sample-log line: {line!r}")
        w, i, t, phase = parts
        return cls(None if w == "-" else w, None if i == "-" else int(i), float(t), phase)


@dataclass
class RunReport:
    algorithm: str
    param: str
    runs: int
    successes: int
    i_min: int | None
    i_max: int | None
    time1: float
    time2: float
    distinct: int
    oracle_count: int | None
    n_unif: float | None
    scaled_variance: float | None
    coverage: float | None
    frac_above_n_unif_8: float | None
    chi2_pvalue: float | None

    @property
    def success_rate(self) -> float:
        return self.successes / self.runs

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = [f.name for f in fields(self)]
        w.writerow(names)
        w.writerow([_csv_cell(getattr(self, n)) for n in names])
        return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else v


def param_key(algorithm: str, params: ExperimentParams) -> str:
    if algorithm == "uniwit":
        return str(params.k)
    if algorithm == "bgp":
        return params.family
    return repr(params.q)


def _one_run(f, algorithm, params, bits, backend, leap) -> SampleOutcome:
    if algorithm == "uniwit":
        cfg = UniWitConfig(params.k, params.budget, leapfrog_start=leap)
        return uniwit(f, cfg, bits, backend=backend)
    if algorithm == "bgp":
        return bgp(f, params.budget, bits, family=params.family, backend=backend)
    s = params.s if params.s is not None else leap
    if s is None:
        try:
            s = estimate_s(f, params.q, params.budget, bits, backend=backend)
        except SearchFailed:
            return SampleOutcome(None, note="no usable s")
    cfg = XorSampleConfig(params.q, s, params.budget)
    if algorithm == "xorsample-prime":
        return xorsample_prime(f, cfg, bits, backend=backend)
    return xorsample(f, cfg, bits, max_restarts=params.max_restarts, backend=backend)


def iter_runs(f: CnfFormula, algorithm: str, params: ExperimentParams, runs: int, bits: BitSource,
              cache: LeapfrogCache | None = None, backend=None):
    """Yield ``(outcome, record)`` for each run, applying the leapfrog protocol.

    Leapfrogging covers UniWit's loop start, and ``s`` for the XORSample
    variants when ``params.s`` is not fixed.  The first ``params.warmup``
    runs are unleapfrogged unless the cache already holds an entry for this
    formula and parameter.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    leapable = params.leapfrog and (algorithm == "uniwit" or (algorithm != "bgp" and params.s is None))
    if leapable and cache is None:
        cache = LeapfrogCache()
    key = (f.fingerprint, algorithm, param_key(algorithm, params))
    warm_left = 0 if (not leapable or cache.get(key) is not None) else params.warmup
    for _ in range(runs):
        if not leapable:
            phase, leap = "plain", None
        elif warm_left > 0:
            phase, leap = "warmup", None
            warm_left -= 1
        else:
            phase, leap = "leapfrog", cache.get(key)
        out = _one_run(f, algorithm, params, bits, backend, leap)
        if leapable and out.ok and out.terminating_index is not None:
            cache.update(key, out.terminating_index)
        rec = RunRecord(str(out.witness) if out.ok else None, out.terminating_index, out.elapsed, phase)
        yield out, rec


def write_log_header(fh: TextIO, f: CnfFormula, algorithm: str, params: ExperimentParams) -> None:
    fh.write(f"# {LOG_MAGIC}\n")
    fh.write(f"# algorithm {algorithm}\n")
    fh.write(f"# param {param_key(algorithm, params)}\n")
    fh.write(f"# fingerprint {f.fingerprint}\n")
    fh.write(f"# num_vars {f.num_vars}\n")


def run_experiment(f: CnfFormula, algorithm: str, params: ExperimentParams, runs: int, bits: BitSource,
                   cache: LeapfrogCache | None = None, oracle_count: int | None = None,
                   log: TextIO | None = None, backend=None,
                   on_run: Callable[[SampleOutcome, RunRecord], None] | None = None) -> RunReport:
    """Run a sampler ``runs`` times and summarise.  Deadline errors propagate."""
    if log is not None:
        write_log_header(log, f, algorithm, params)
    records = []
    for out, rec in iter_runs(f, algorithm, params, runs, bits, cache, backend):
        records.append(rec)
        if log is not None:
            log.write(rec.to_line() + "\n")
            log.flush()
        if on_run is not None:
            on_run(out, rec)
    return build_report(algorithm, param_key(algorithm, params), records, oracle_count)


def build_report(algorithm: str, param: str, records: Iterable[RunRecord],
                 oracle_count: int | None = None) -> RunReport:
    records = list(records)
    if not records:
        raise ValueError("no runs recorded")
    hits = [r.witness for r in records if r.witness is not None]
    table = FrequencyTable.from_samples(hits)
    idx = [r.index for r in records if r.index is not None]
    time1 = math.fsum(r.elapsed for r in records if r.phase != "leapfrog")
    time2 = math.fsum(r.elapsed for r in records if r.phase == "leapfrog")
    report = RunReport(
        algorithm=algorithm, param=param, runs=len(records), successes=len(hits),
        i_min=min(idx) if idx else None, i_max=max(idx) if idx else None,
        time1=time1, time2=time2, distinct=table.N, oracle_count=oracle_count,
        n_unif=None, scaled_variance=None, coverage=None, frac_above_n_unif_8=None, chi2_pvalue=None,
    )
    if not hits:
        return report
    nu = n_unif(table, oracle_count)
    report.n_unif = nu
    report.frac_above_n_unif_8 = fraction_at_least(table, nu / 8, oracle_count)
    if table.N >= 2:
        report.scaled_variance = scaled_variance(table)
    if oracle_count is not None:
        report.coverage = coverage(table, oracle_count)
        if oracle_count >= 2:
            report.chi2_pvalue = float(chi_square_uniform(table, oracle_count).pvalue)
    return report


def read_log(text: str) -> tuple[dict[str, str], list[RunRecord]]:
    header: dict[str, str] = {}
    records = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(" ")
            header[key] = value
            continue
        records.append(RunRecord.from_line(line))
    if header.get("witgen-sample-log") != "1":
        raise ValueError("not a witgen sample log")
    return header, records


def report_from_log(text: str, oracle_count: int | None = None) -> RunReport:
    header, records = read_log(text)
    return build_report(header.get("algorithm", "?"), header.get("param", "?"), records, oracle_count)
