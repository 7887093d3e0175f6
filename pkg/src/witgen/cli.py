"""``witgen`` command line: ``sample`` and ``report`` subcommands."""

from __future__ import annotations

import argparse
import sys

from .bench.runner import ALGORITHMS, DEFAULT_WARMUP, ExperimentParams, report_from_log, run_experiment
from .entropy import EntropyExhausted, FileBitSource, SeededBitSource
from .enumeration import DeadlineExceeded, ExternalSolverBackend, SolveBudget
from .formula import DimacsError, parse_dimacs
from .samplers import LeapfrogCache


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="witgen", description="Sample witnesses of CNF formulas.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw witnesses; one line per run on stdout ('-' for a failed run)")
    s.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    s.add_argument("--input", required=True, help="DIMACS CNF file")
    s.add_argument("--k", type=int, default=3, help="UniWit tuning parameter (default 3)")
    s.add_argument("--q", type=float, default=0.5, help="xor density for XORSample variants")
    s.add_argument("--s", type=int, default=None, help="number of xors; estimated when omitted")
    s.add_argument("--family", choices=("algebraic", "conv"), default="algebraic", help="BGP hash family")
    s.add_argument("--max-restarts", type=int, default=100)
    s.add_argument("--runs", type=int, default=1)
    src = s.add_mutually_exclusive_group()
    src.add_argument("--seed", type=int, default=None, help="PCG64 seed (default 0)")
    src.add_argument("--random-file", help="raw random bytes, read MSB first")
    s.add_argument("--solver", help="external solver accepting extended DIMACS")
    s.add_argument("--per-call-timeout", type=float, default=3000.0)
    s.add_argument("--deadline", type=float, default=None, help="overall wall-clock limit in seconds")
    s.add_argument("--leapfrog-cache", help="file holding cached loop-start indices")
    s.add_argument("--no-leapfrog", action="store_true")
    s.add_argument("--warmup", type=int, default=DEFAULT_WARMUP, help="unleapfrogged runs before leapfrogging")
    s.add_argument("--log", help="write a sample log here")

    r = sub.add_parser("report", help="metrics for a sample log")
    r.add_argument("--log", required=True)
    r.add_argument("--oracle-count", type=int, default=None, help="true number of witnesses, if known")
    r.add_argument("--out", choices=("json", "csv"), default="json")
    return p


def _sample(args) -> int:
    try:
        with open(args.input, encoding="ascii") as fh:
            f = parse_dimacs(fh.read())
    except (OSError, DimacsError) as e:
        print(f"witgen: cannot read {args.input}: {e}", file=sys.stderr)
        return 2
    if args.seed is not None and args.seed < 0:
        print("witgen: --seed must be non-negative", file=sys.stderr)
        return 2
    bits = FileBitSource(args.random_file) if args.random_file else SeededBitSource(args.seed or 0)
    backend = ExternalSolverBackend(args.solver) if args.solver else None
    params = ExperimentParams(
        k=args.k, q=args.q, s=args.s, family=args.family, max_restarts=args.max_restarts,
        budget=SolveBudget.with_overall(args.per_call_timeout, args.deadline),
        warmup=args.warmup, leapfrog=not args.no_leapfrog,
    )
    cache = LeapfrogCache.load(args.leapfrog_cache) if args.leapfrog_cache else None
    log = open(args.log, "w", encoding="ascii") if args.log else None

    def emit(out, rec):
        print(rec.witness if rec.witness is not None else "-", flush=True)

    status = 0
    try:
        report = run_experiment(f, args.algorithm, params, args.runs, bits, cache=cache,
                                log=log, backend=backend, on_run=emit)
        print(f"witgen: {report.successes}/{report.runs} runs succeeded", file=sys.stderr)
    except DeadlineExceeded:
        print("witgen: overall deadline exceeded", file=sys.stderr)
        status = 3
    except EntropyExhausted as e:
        print(f"witgen: {e}", file=sys.stderr)
        status = 4
    finally:
        if log is not None:
            log.close()
        if isinstance(bits, FileBitSource):
            bits.close()
    if cache is not None:
        cache.save(args.leapfrog_cache)
    return status


def _report(args) -> int:
    with open(args.log, encoding="ascii") as fh:
        report = report_from_log(fh.read(), oracle_count=args.oracle_count)
    sys.stdout.write(report.to_json() + "\n" if args.out == "json" else report.to_csv())
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "sample":
        return _sample(args)
    return _report(args)


if __name__ == "__main__":
    sys.exit(main())
