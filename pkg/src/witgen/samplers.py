"""Witness samplers: UniWit, BGP, XORSample' and XORSample.

Each sampler returns a :class:`SampleOutcome`; a failed run (the ``⊥``
symbol) has ``witness is None``.  Overall-deadline expiry is not a failed
run but an error (:class:`~witgen.enumeration.DeadlineExceeded`).

Random choices are drawn from a :class:`~witgen.entropy.BitSource` in the
order the algorithms make them.
"""

from __future__ import annotations

import itertools
import statistics
import threading
import warnings
import time
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .entropy import BitSource
from .enumeration import (
    DEFAULT_BUDGET,
    SolveBudget,
    SolveTimeout,
    bounded_sat,
    model_count,
    nth_witness,
)
from .formula import AugmentedFormula, CnfFormula, Witness
from .hashing import (
    XorDistributionParams,
    apply_algebraic_hash_ints,
    bits_to_int,
    conv_hash_to_xors,
    sample_algebraic_hash,
    sample_conv_hash,
    sample_xor_constraint,
)



class GuaranteeWarning(UserWarning):
    """Parameters fall outside the range where the sampler's bounds are proven."""


@dataclass
class SampleOutcome:
    witness: Witness | None
    terminating_index: int | None = None
    cells_tried: int = 0
    solver_calls: int = 0
    elapsed: float = 0.0
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.witness is not None


@dataclass(frozen=True)
class UniWitConfig:
    k: int = 3
    budget: SolveBudget = DEFAULT_BUDGET
    leapfrog_start: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class XorSampleConfig:
    q: float = 0.5
    s: int = 0
    budget: SolveBudget = DEFAULT_BUDGET

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if self.s < 0:
            raise ValueError("s must be >= 0")


def iroot_ceil(x: int, k: int) -> int:
    """Smallest integer ``r >= 0`` with ``r**k >= x``."""
    if x <= 1:
        return max(x, 0)
    r = int(round(x ** (1.0 / k)))
    while r ** k < x:
        r += 1
    while r > 0 and (r - 1) ** k >= x:
        r -= 1
    return r


def pivot(n: int, k: int) -> int:
    """``ceil(2 * n**(1/k))`` in exact integer arithmetic."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    # p >= 2 n^(1/k)  <=>  p^k >= 2^k n
    return iroot_ceil((1 << k) * n, k)


def floor_log2(n: int) -> int:
    return n.bit_length() - 1


def ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def loop_start(n: int, k: int) -> int:
    """``floor(log2(n) / k)``, the first hash width offset of UniWit's loop."""
    # l <= log2(n)/k  <=>  k*l <= floor(log2 n)
    return floor_log2(n) // k


def _pick_uniformly(ws, bits: BitSource) -> Witness:
    return ws[bits.uniform_int(len(ws)) - 1]


def uniwit(f: CnfFormula, cfg: UniWitConfig, bits: BitSource, backend=None) -> SampleOutcome:
    """One run of UniWit on ``f``.

    Hash functions come from ``H_conv(n, i-l, 2)``.  A per-call solver
    timeout inside the loop repeats the same ``i`` with a fresh hash and
    cell.  If ``cfg.leapfrog_start`` is set the loop starts there instead
    of at ``l``; the near-uniformity guarantee is not claimed in that mode.
    """
    t0 = time.monotonic()
    n, k = f.num_vars, cfg.k
    budget = cfg.budget
    if n <= (1 << k):
        warnings.warn(f"n={n} <= 2^k={1 << k}: UniWit's uniformity bounds do not apply", GuaranteeWarning, stacklevel=2)
    piv = pivot(n, k)
    out = SampleOutcome(None)

    S = bounded_sat(f, piv + 1, budget, backend)
    out.solver_calls += 1
    if len(S) <= piv:
        out.elapsed = time.monotonic() - t0
        if not S:
            out.note = "no witnesses"
            return out
        out.witness = _pick_uniformly(S, bits)
        out.elapsed = time.monotonic() - t0
        return out

    l = loop_start(n, k)
    i = l - 1
    if cfg.leapfrog_start is not None:
        i = min(max(l, cfg.leapfrog_start), n) - 1
    while True:
        i += 1
        m = i - l
        h = sample_conv_hash(n, m, bits)
        alpha = bits.next_bits(m)
        cell = AugmentedFormula(f, tuple(conv_hash_to_xors(h, alpha)))
        out.cells_tried += 1
        out.solver_calls += 1
        try:
            S = bounded_sat(cell, piv + 1, budget, backend)
        except SolveTimeout:
            i -= 1
            continue
        if 1 <= len(S) <= piv or i >= n:
            break

    out.terminating_index = i
    if not 1 <= len(S) <= piv:
        out.note = "no small cell"
    else:
        j = bits.uniform_int(piv)
        if j <= len(S):
            out.witness = S[j - 1]
        else:
            out.note = "rejected"
    out.elapsed = time.monotonic() - t0
    return out


def bgp(f: CnfFormula, budget: SolveBudget, bits: BitSource,
        family: Literal["algebraic", "conv"] = "algebraic", backend=None) -> SampleOutcome:
    """One run of the BGP uniform generator (failing with ⊥ when no split is found).

    With ``family="algebraic"`` hashes come from the degree-``n-1``
    polynomial family over ``GF(2^max(n, i-l))``; cell sizes are then read
    off the full witness list, since polynomial cells have no CNF encoding.
    With ``family="conv"`` every cell is checked by ``bounded_sat`` on the
    formula conjoined with the cell's parity constraints.
    """
    if family not in ("algebraic", "conv"):
        raise ValueError(f"unknown hash family {family!r}")
    t0 = time.monotonic()
    n = f.num_vars
    piv = 2 * n * n
    out = SampleOutcome(None)

    S = bounded_sat(f, piv + 1, budget, backend)
    out.solver_calls += 1
    if len(S) <= piv:
        if not S:
            out.note = "no witnesses"
        else:
            out.witness = _pick_uniformly(S, bits)
        out.elapsed = time.monotonic() - t0
        return out

    everything = None
    l = 2 * ceil_log2(n)
    i = l - 1
    while True:
        i += 1
        m = i - l
        out.cells_tried += 1
        if family == "algebraic":
            h = sample_algebraic_hash(n, m, n, bits)
            if everything is None:
                everything = bounded_sat(f, 1 << n, budget, backend)
                out.solver_calls += 1
                weights = np.uint64(1) << np.arange(n - 1, -1, -1, dtype=np.uint64)
                packed = np.array([y.bits for y in everything], dtype=np.uint64).reshape(-1, n) @ weights
            vals = apply_algebraic_hash_ints(h, packed).astype(np.int64)
            balanced = int(np.bincount(vals).max()) <= piv
            lookup = lambda a, vals=vals: [everything[t] for t in np.flatnonzero(vals == bits_to_int(a))]
        else:
            h = sample_conv_hash(n, m, bits)
            listed: dict[tuple[int, ...], list[Witness]] = {}
            balanced = True
            for alpha in itertools.product((0, 1), repeat=m):
                cell = AugmentedFormula(f, tuple(conv_hash_to_xors(h, alpha)))
                ws = bounded_sat(cell, piv + 1, budget, backend)
                out.solver_calls += 1
                if len(ws) > piv:
                    balanced = False
                    break
                listed[alpha] = list(ws)
            lookup = lambda a, listed=listed: listed.get(a, [])
        if balanced or i >= n - 1:
            break

    out.terminating_index = i
    if not balanced:
        out.note = "no balanced hash"
        out.elapsed = time.monotonic() - t0
        return out
    alpha = bits.next_bits(m)
    cell_ws = lookup(alpha)
    j = bits.uniform_int(piv)
    if j <= len(cell_ws):
        out.witness = cell_ws[j - 1]
    else:
        out.note = "rejected"
    out.elapsed = time.monotonic() - t0
    return out


def _random_xors(n: int, q: float, s: int, bits: BitSource):
    params = XorDistributionParams(n, q)
    return tuple(sample_xor_constraint(params, bits) for _ in range(s))


def xorsample_prime(f: CnfFormula, cfg: XorSampleConfig, bits: BitSource, backend=None) -> SampleOutcome:
    """XORSample': conjoin ``s`` random XORs, count, return a uniformly chosen survivor."""
    t0 = time.monotonic()
    out = SampleOutcome(None, terminating_index=cfg.s, cells_tried=1)
    g = AugmentedFormula(f, _random_xors(f.num_vars, cfg.q, cfg.s, bits))
    mc = model_count(g, cfg.budget, backend)
    out.solver_calls += 1
    if mc >= 1:
        i = bits.uniform_int(mc)
        out.witness = nth_witness(g, i, cfg.budget, backend)
        out.solver_calls += 1
    else:
        out.note = "no survivors"
    out.elapsed = time.monotonic() - t0
    return out


def xorsample(f: CnfFormula, cfg: XorSampleConfig, bits: BitSource,
              max_restarts: int = 100, backend=None) -> SampleOutcome:
    """XORSample: redraw ``s`` XORs until exactly one witness survives."""
    if max_restarts < 1:
        raise ValueError("max_restarts must be >= 1")
    t0 = time.monotonic()
    out = SampleOutcome(None, terminating_index=cfg.s)
    for _ in range(max_restarts):
        g = AugmentedFormula(f, _random_xors(f.num_vars, cfg.q, cfg.s, bits))
        out.cells_tried += 1
        # deciding mc == 1 needs at most two witnesses
        ws = bounded_sat(g, 2, cfg.budget, backend)
        out.solver_calls += 1
        if len(ws) == 1:
            out.witness = ws[0]
            break
    else:
        out.note = "restarts exhausted"
    out.elapsed = time.monotonic() - t0
    return out


class SearchFailed(RuntimeError):
    """No value of ``s`` gave a median surviving count in range."""


def estimate_s(f: CnfFormula, q: float, budget: SolveBudget, bits: BitSource,
               trials: int = 5, threshold: int = 16, backend=None) -> int:
    """Binary search for the smallest ``s`` whose median surviving count is in ``[1, threshold]``.

    Counts are capped at ``threshold + 1`` (no exact counting needed), and
    each probed ``s`` is measured once on ``trials`` fresh XOR draws.
    """
    n = f.num_vars
    seen: dict[int, int] = {}

    def median_count(s: int) -> int:
        if s not in seen:
            counts = []
            for _ in range(trials):
                g = AugmentedFormula(f, _random_xors(n, q, s, bits))
                counts.append(len(bounded_sat(g, threshold + 1, budget, backend)))
            seen[s] = statistics.median_low(counts)
        return seen[s]

    if median_count(0) < 1:
        raise SearchFailed("formula has no witnesses")
    if median_count(n) > threshold:
        raise SearchFailed(f"median count still above {threshold} with s={n}")
    lo, hi = 0, n
    while lo < hi:
        mid = (lo + hi) // 2
        if median_count(mid) <= threshold:
            hi = mid
        else:
            lo = mid + 1
    if median_count(lo) < 1:
        raise SearchFailed(f"median count jumps from above {threshold} to 0 at s={lo}")
    return lo


@dataclass
class LeapfrogCache:
    """Smallest terminating index seen per ``(fingerprint, algorithm, param)``.

    Persisted one entry per line as ``<fingerprint> <algorithm> <param> <index>``.
    """

    entries: dict[tuple[str, str, str], int] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def get(self, key) -> int | None:
        return self.entries.get(_norm_key(key))

    def update(self, key, observed_index: int) -> int:
        key = _norm_key(key)
        with self._lock:
            prev = self.entries.get(key)
            value = observed_index if prev is None else min(prev, observed_index)
            self.entries[key] = value
        return value

    def dumps(self) -> str:
        lines = [f"{fp} {alg} {param} {idx}" for (fp, alg, param), idx in sorted(self.entries.items())]
        return "".join(line + "\n" for line in lines)

    @classmethod
    def loads(cls, text: str) -> "LeapfrogCache":
        cache = cls()
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"leapfrog cache line {lineno}: expected 4 fields, got {len(parts)}")
            cache.update((parts[0], parts[1], parts[2]), int(parts[3]))
        return cache

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "LeapfrogCache":
        try:
            with open(path, encoding="ascii") as fh:
                return cls.loads(fh.read())
        except FileNotFoundError:
            return cls()


def _norm_key(key) -> tuple[str, str, str]:
    fp, alg, param = key
    return str(fp), str(alg), str(param)


def leapfrog_update(cache: LeapfrogCache, key, observed_index: int) -> LeapfrogCache:
    cache.update(key, observed_index)
    return cache
