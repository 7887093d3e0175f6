"""Sequential random-bit sources.

Every random choice in the samplers draws from a :class:`BitSource`, which
hands out bits strictly in order and counts how many it has given away.
Two kinds exist: a seeded PCG64 stream (the default, reproducible) and a
raw bits file read most-significant-bit first (HotBits-style downloads).
"""

from __future__ import annotations

import os

import numpy as np

_BLOCK_BYTES = 4096
BERNOULLI_BITS = 32


class EntropyExhausted(RuntimeError):
    """A file-backed source ran out of bits."""


class BitSource:
    """Base class: buffers bytes from ``_read_block`` and serves single bits."""

    kind = "abstract"

    def __init__(self):
        self._buf: list[int] = []
        self._pos = 0
        self.cursor = 0

    def _read_block(self) -> bytes:
        raise NotImplementedError

    def _fill(self, count: int) -> None:
        while len(self._buf) - self._pos < count:
            block = self._read_block()
            if not block:
                raise EntropyExhausted(
                    f"{self.kind} source exhausted after {self.cursor} bits "
                    f"({count} requested, {len(self._buf) - self._pos} left)"
                )
            rest = self._buf[self._pos:]
            bits = np.unpackbits(np.frombuffer(block, dtype=np.uint8)).tolist()
            self._buf = rest + bits
            self._pos = 0

    def next_bits(self, count: int) -> tuple[int, ...]:
        if count < 0:
            raise ValueError("count must be non-negative")
        if count == 0:
            return ()
        self._fill(count)
        out = self._buf[self._pos:self._pos + count]
        self._pos += count
        self.cursor += count
        return tuple(out)

    def next_bit(self) -> int:
        self._fill(1)
        bit = self._buf[self._pos]
        self._pos += 1
        self.cursor += 1
        return bit

    def next_int(self, width: int) -> int:
        """Unsigned integer from the next ``width`` bits, MSB first."""
        value = 0
        for b in self.next_bits(width):
            value = (value << 1) | b
        return value

    def uniform_int(self, upper: int) -> int:
        """Exactly uniform integer in ``1..upper`` by rejection.

        Each round reads ``ceil(log2 upper)`` bits and rejects values that
        are ``>= upper``.
        """
        if upper < 1:
            raise ValueError(f"range must be >= 1, got {upper}")
        width = (upper - 1).bit_length()
        while True:
            v = self.next_int(width)
            if v < upper:
                return v + 1

    def bernoulli(self, q: float) -> bool:
        """True with probability ``q``, to 32-bit dyadic precision."""
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {q}")
        threshold = int(q * (1 << BERNOULLI_BITS))
        return self.next_int(BERNOULLI_BITS) < threshold


class SeededBitSource(BitSource):
    """Deterministic PCG64 bit stream.

    ``stream`` selects an independent child of the master ``seed`` so that
    concurrent consumers can each own a source.
    """

    kind = "seeded"

    def __init__(self, seed: int = 0, stream: int = 0):
        super().__init__()
        self.seed = int(seed)
        self.stream = int(stream)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def _read_block(self) -> bytes:
        return self._gen.bytes(_BLOCK_BYTES)

    def derive(self, stream: int) -> "SeededBitSource":
        return SeededBitSource(self.seed, stream)


class FileBitSource(BitSource):
    """Raw bytes from a file (or an in-memory buffer), MSB first; never wraps."""

    kind = "file"

    def __init__(self, path: str | os.PathLike | None = None, data: bytes | None = None):
        super().__init__()
        if (path is None) == (data is None):
            raise ValueError("give exactly one of path or data")
        self.path = path
        self._data = data
        self._offset = 0
        self._fh = open(path, "rb") if path is not None else None

    @classmethod
    def from_bits(cls, bits: str) -> "FileBitSource":
        """In-memory source from a ``'0101...'`` string; length must be a multiple of 8."""
        if len(bits) % 8:
            raise ValueError("bit-string length must be a multiple of 8")
        data = int(bits, 2).to_bytes(len(bits) // 8, "big") if bits else b""
        return cls(data=data)

    def _read_block(self) -> bytes:
        if self._fh is not None:
            return self._fh.read(_BLOCK_BYTES)
        block = self._data[self._offset:self._offset + _BLOCK_BYTES]
        self._offset += len(block)
        return block

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None
