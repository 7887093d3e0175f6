"""Random hash families over bit-vectors.

* ``H_conv(n, m, 2)``: the wrapped-convolution family
  ``h_{a,b}(y) = (a . y) xor b`` with ``a`` of length ``n+m-1`` and ``b`` of
  length ``m``.  It is pairwise independent and linear, so each output bit
  is one parity constraint over the input variables.
* ``X(n, q)``: random parity constraints where each variable joins with
  probability ``q`` and the right-hand side is a fair bit.
* An algebraic family ``y -> sum_j c_j y^j`` over ``GF(2^w)``, ``w <= 64``,
  used by the BGP baseline.

All bit-vectors are tuples of 0/1 indexed so that element ``p - 1`` is the
paper-style 1-based position ``p``.  ``a[1]`` is the first bit drawn.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from numba import njit

from .entropy import BitSource
from .formula import XorConstraint

Bits = tuple[int, ...]

MAX_FIELD_WIDTH = 64


@dataclass(frozen=True)
class ConvHash:
    n: int
    m: int
    a: Bits
    b: Bits

    def __post_init__(self):
        if self.m < 0 or self.n < 1:
            raise ValueError("need n >= 1 and m >= 0")
        if len(self.b) != self.m:
            raise ValueError(f"len(b)={len(self.b)} but m={self.m}")
        if len(self.a) != max(self.n + self.m - 1, 0):
            raise ValueError(f"len(a)={len(self.a)} but n+m-1={self.n + self.m - 1}")

    def __call__(self, y: Sequence[int]) -> Bits:
        return apply_conv_hash(self, y)


def sample_conv_hash(n: int, m: int, bits: BitSource) -> ConvHash:
    """Draw ``a`` then ``b`` from consecutive bits (``n + 2m - 1`` in total)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    a = bits.next_bits(n + m - 1)
    b = bits.next_bits(m)
    return ConvHash(n, m, a, b)


def apply_conv_hash(h: ConvHash, y: Sequence[int]) -> Bits:
    if len(y) != h.n:
        raise ValueError(f"input has length {len(y)}, hash expects {h.n}")
    a, n = h.a, h.n
    out = []
    for i in range(h.m):
        c = 0
        window = a[i:i + n]
        for yj, aj in zip(y, window):
            c ^= yj & aj
        out.append(c ^ h.b[i])
    return tuple(out)


def conv_hash_to_xors(h: ConvHash, alpha: Sequence[int]) -> list[XorConstraint]:
    """Parity constraints whose common solutions are exactly ``h^{-1}(alpha)``.

    Output bit ``j`` reads the window ``a[j .. j+n-1]``: variable ``p`` takes
    part iff ``a[j+p-1] = 1``, and the constraint's rhs is ``alpha[j] xor b[j]``.
    """
    if len(alpha) != h.m:
        raise ValueError(f"alpha has length {len(alpha)}, hash has m={h.m}")
    n = h.n
    ones = [i for i, bit in enumerate(h.a) if bit]
    out = []
    for j in range(h.m):
        lo, hi = bisect_left(ones, j), bisect_left(ones, j + n)
        vs = frozenset([i - j + 1 for i in ones[lo:hi]])
        out.append(XorConstraint(vs, alpha[j] ^ h.b[j]))
    return out


@dataclass(frozen=True)
class XorDistributionParams:
    n: int
    q: float

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {self.q}")


def sample_xor_constraint(p: XorDistributionParams, bits: BitSource) -> XorConstraint:
    """One constraint from ``X(n, q)``: variables 1..n in order, then the rhs bit."""
    vs = frozenset(v for v in range(1, p.n + 1) if bits.bernoulli(p.q))
    return XorConstraint(vs, bits.next_bit())


# --- GF(2^w) -----------------------------------------------------------------

def _clmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _polymod(a: int, mod: int) -> int:
    dm = mod.bit_length()
    while a.bit_length() >= dm:
        a ^= mod << (a.bit_length() - dm)
    return a


def _polygcd(a: int, b: int) -> int:
    while b:
        a, b = b, _polymod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(poly: int) -> bool:
    """Rabin's test for a binary polynomial given as an int (bit i = x^i)."""
    w = poly.bit_length() - 1
    if w < 1:
        return False

    def x_pow_2k(k: int) -> int:
        t = 0b10
        for _ in range(k):
            t = _polymod(_clmul(t, t), poly)
        return t

    if x_pow_2k(w) != _polymod(0b10, poly):
        return False
    for p in _prime_factors(w):
        if _polygcd(poly, x_pow_2k(w // p) ^ 0b10) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def irreducible_modulus(w: int) -> int:
    """Fixed modulus for ``GF(2^w)``: the lowest-weight irreducible polynomial.

    The smallest-middle-term trinomial ``x^w + x^k + 1`` if one exists,
    otherwise the lexicographically smallest pentanomial
    ``x^w + x^k1 + x^k2 + x^k3 + 1`` with ``k1 > k2 > k3``.
    """
    if not 1 <= w <= MAX_FIELD_WIDTH:
        raise ValueError(f"field width {w} outside 1..{MAX_FIELD_WIDTH}")
    if w == 1:
        return 0b11
    top = (1 << w) | 1
    for k in range(1, w):
        if is_irreducible(top | (1 << k)):
            return top | (1 << k)
    for k1 in range(3, w):
        for k2 in range(2, k1):
            for k3 in range(1, k2):
                poly = top | (1 << k1) | (1 << k2) | (1 << k3)
                if is_irreducible(poly):
                    return poly
    raise AssertionError(f"no low-weight irreducible polynomial of degree {w}")


def gf_mul(a: int, b: int, w: int) -> int:
    """Product in ``GF(2^w)`` reduced by :func:`irreducible_modulus`."""
    mod = irreducible_modulus(w)
    r = 0
    hi = 1 << w
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & hi:
            a ^= mod
    return r


@dataclass(frozen=True)
class AlgebraicHash:
    """``y -> low m bits of sum_j coeffs[j] * y^j`` in ``GF(2^w)``."""

    w: int
    m: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.w <= MAX_FIELD_WIDTH:
            raise ValueError(f"field width {self.w} outside 1..{MAX_FIELD_WIDTH}")
        if not self.coeffs:
            raise ValueError("need at least one coefficient")
        if not 0 <= self.m <= self.w:
            raise ValueError("need 0 <= m <= w")
        if any(not 0 <= c < (1 << self.w) for c in self.coeffs):
            raise ValueError("coefficient outside the field")

    @property
    def r(self) -> int:
        return len(self.coeffs)

    def __call__(self, y: Sequence[int]) -> Bits:
        return apply_algebraic_hash(self, y)


def sample_algebraic_hash(n: int, m: int, r: int, bits: BitSource) -> AlgebraicHash:
    """Draw ``r`` coefficients of ``w = max(n, m)`` bits each, ``a_0`` first."""
    w = max(n, m)
    if w > MAX_FIELD_WIDTH:
        raise ValueError(f"field width {w} exceeds {MAX_FIELD_WIDTH}")
    coeffs = tuple(bits.next_int(w) for _ in range(r))
    return AlgebraicHash(w, m, coeffs)


def bits_to_int(y: Sequence[int]) -> int:
    v = 0
    for b in y:
        v = (v << 1) | b
    return v


def int_to_bits(v: int, width: int) -> Bits:
    return tuple((v >> (width - 1 - i)) & 1 for i in range(width))


def apply_algebraic_hash(h: AlgebraicHash, y: Sequence[int]) -> Bits:
    """Horner evaluation; ``y`` is read as a field element MSB first."""
    if len(y) > h.w:
        raise ValueError(f"input width {len(y)} exceeds field width {h.w}")
    x = bits_to_int(y)
    acc = h.coeffs[-1]
    for c in reversed(h.coeffs[:-1]):
        acc = gf_mul(acc, x, h.w) ^ c
    return int_to_bits(acc & ((1 << h.m) - 1), h.m)


@njit(cache=True)
def _horner_many(coeffs, xs, w, low, out_mask):
    mask = (np.uint64(1) << np.uint64(w - 1) << np.uint64(1)) - np.uint64(1)
    top = np.uint64(w - 1)
    one = np.uint64(1)
    out = np.empty(xs.shape[0], dtype=np.uint64)
    for t in range(xs.shape[0]):
        x = xs[t]
        acc = coeffs[coeffs.shape[0] - 1]
        for c in range(coeffs.shape[0] - 2, -1, -1):
            a, b, r = acc, x, np.uint64(0)
            for _ in range(w):
                if b & one:
                    r ^= a
                b >>= one
                carry = (a >> top) & one
                a = ((a << one) & mask) ^ (carry * low)
            acc = r ^ coeffs[c]
        out[t] = acc & out_mask
    return out


def apply_algebraic_hash_ints(h: AlgebraicHash, xs: np.ndarray) -> np.ndarray:
    """Vectorised :func:`apply_algebraic_hash` on inputs already packed as integers."""
    low = irreducible_modulus(h.w) & ((1 << h.w) - 1)
    return _horner_many(np.array(h.coeffs, dtype=np.uint64), np.asarray(xs, dtype=np.uint64),
                        h.w, np.uint64(low), np.uint64((1 << h.m) - 1))
