"""Seedable deterministic random byte stream.

Every random choice in the package flows through an Rng so that protocol
transcripts are exactly reproducible from a seed.  Production callers get
an Rng seeded from OS entropy via system_rng().
"""

from __future__ import annotations

import hashlib
import os

_BLOCK = hashlib.sha256().digest_size


class Rng:
    """SHA-256 in counter mode over a seed-derived key."""

    def __init__(self, seed: bytes):
        if not isinstance(seed, (bytes, bytearray)):
            raise TypeError("seed must be bytes")
        self._key = hashlib.sha256(b"timelock-rng:" + bytes(seed)).digest()
        self._counter = 0
        self._pool = b""

    def read(self, n: int) -> bytes:
        """Return the next n bytes of the stream."""
        if n < 0:
            raise ValueError("byte count must be non-negative")
        while len(self._pool) < n:
            block = hashlib.sha256(
                self._key + self._counter.to_bytes(8, "big")
            ).digest()
            self._counter += 1
            self._pool += block
        out, self._pool = self._pool[:n], self._pool[n:]
        return out

    def randbits(self, k: int) -> int:
        """Uniform integer with at most k bits."""
        if k < 0:
            raise ValueError("bit count must be non-negative")
        if k == 0:
            return 0
        nbytes = (k + 7) // 8
        x = int.from_bytes(self.read(nbytes), "big")
        return x >> (8 * nbytes - k)

    def randint_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        k = bound.bit_length()
        while True:
            x = self.randbits(k)
            if x < bound:
                return x

    def derive(self, label: bytes) -> "Rng":
        """Independent substream; stable under the original seed, not read position."""
        child = Rng(b"")
        child._key = hashlib.sha256(b"timelock-derive:" + self._key + label).digest()
        child._counter = 0
        child._pool = b""
        return child


def system_rng() -> Rng:
    """Rng seeded from the OS entropy source."""
    return Rng(os.urandom(32))
