"""Uniformity metrics over a tally of sampled witnesses."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import stats

DEFAULT_K = 1e10


@dataclass(frozen=True)
class FrequencyTable:
    """Counts of each distinct witness (keyed by bit-string) over M successful runs."""

    counts: dict[str, int]

    @classmethod
    def from_samples(cls, samples: Iterable) -> "FrequencyTable":
        return cls(dict(Counter(str(s) for s in samples)))

    @property
    def M(self) -> int:
        return sum(self.counts.values())

    @property
    def N(self) -> int:
        return len(self.counts)

    def frequencies(self) -> dict[str, float]:
        m = self.M
        return {w: c / m for w, c in self.counts.items()}


def scaled_variance(t: FrequencyTable, K: float = DEFAULT_K) -> float:
    """``K/(N-1) * sum_i (f_i - mean f)^2`` over the N observed witnesses."""
    if t.N < 2:
        raise ValueError("scaled variance needs at least two distinct witnesses")
    f = np.array(sorted(t.frequencies().values()), dtype=float)
    return float(K / (t.N - 1) * np.sum((f - f.mean()) ** 2))


def n_unif(t: FrequencyTable, true_count: int | None = None) -> float:
    """Expected hits per witness under perfect uniformity."""
    denom = true_count if true_count is not None else t.N
    return t.M / denom


def coverage(t: FrequencyTable, true_count: int) -> float:
    return t.N / true_count


def fraction_at_least(t: FrequencyTable, threshold: float, true_count: int | None = None) -> float:
    """Share of witnesses hit at least ``threshold`` times (unseen witnesses count as 0)."""
    denom = true_count if true_count is not None else t.N
    hits = sum(1 for c in t.counts.values() if c >= threshold)
    return hits / denom


def chi_square_uniform(t: FrequencyTable, true_count: int):
    """Pearson chi-square of the tally against uniform over ``true_count`` witnesses."""
    if t.N > true_count:
        raise ValueError("more distinct witnesses observed than exist")
    observed = np.zeros(true_count)
    observed[:t.N] = sorted(t.counts.values())
    return stats.chisquare(observed)
