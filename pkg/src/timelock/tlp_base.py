"""RSA-based time-lock puzzle.

The message is encrypted under a symmetric key k, and k is masked by
adding r^(2^T) mod N.  The creator shortcuts the mask exponent through
the totient trapdoor (a = 2^T mod phi); anyone else must grind T
sequential squarings to recover it.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import manifest
from .group_arith import (
    OpCounter,
    RsaGroup,
    RsaTrapdoor,
    gen_modulus,
    group_from_primes,
    pow_mod,
    repeated_square,
    sample_unit,
)
from .primitives import Ciphertext, DecryptionError, KEY_LEN, ske_dec, ske_enc
from .rng import Rng


class KeyEmbeddingError(ValueError):
    """Symmetric key does not fit below the modulus."""


@dataclass(frozen=True)
class TlpPublic:
    """Public puzzle parameters (N, T, r)."""

    group: RsaGroup
    t: int
    r: int

    def __post_init__(self):
        if not 0 <= self.r < self.group.n:
            raise ValueError("generator out of range")
        if self.t < 0:
            raise ValueError("squaring count must be non-negative")


@dataclass(frozen=True)
class TlpSecret:
    """Trapdoor, shortcut exponent a = 2^T mod phi, and masking key."""

    trapdoor: RsaTrapdoor
    a: int
    k: bytes


@dataclass(frozen=True)
class TlpPuzzle:
    """Encrypted message p1 and masked key p2 = (k + r^a) mod N."""

    p1: Ciphertext
    p2: int


def sample_masking_key(group: RsaGroup, rng: Rng) -> bytes:
    """Draw a key that embeds below N, fixed at 32 bytes.

    On toy moduli (N < 2^256) the key is uniform in [0, N) and left-padded;
    full 256-bit entropy needs a production-size modulus.
    """
    bound = min(1 << (8 * KEY_LEN), group.n)
    return rng.randint_below(bound).to_bytes(KEY_LEN, "big")


def tlp_setup(
    bits: int,
    delta: int,
    s_rate: int,
    rng: Rng,
    safe: bool = False,
    primes: tuple[int, int] | None = None,
) -> tuple[TlpPublic, TlpSecret]:
    """Create puzzle keys for a delay of delta seconds against rate S.

    T = S*delta squarings.  `primes` injects an explicit (q1, q2), used by
    tests with toy moduli.
    """
    if s_rate < 1:
        raise ValueError("squaring rate must be >= 1")
    if delta < 0:
        raise ValueError("delay must be non-negative")
    if primes is not None:
        group, trapdoor = group_from_primes(*primes)
    else:
        group, trapdoor = gen_modulus(bits, safe=safe, rng=rng)
    t = s_rate * delta
    a = pow(2, t, trapdoor.phi)
    r = sample_unit(group, rng)
    k = sample_masking_key(group, rng)
    return TlpPublic(group=group, t=t, r=r), TlpSecret(trapdoor=trapdoor, a=a, k=k)


def tlp_gen(
    m: bytes,
    pk: TlpPublic,
    sk: TlpSecret,
    rng: Rng,
    counter: OpCounter | None = None,
) -> TlpPuzzle:
    """Lock m: one short trapdoor exponentiation, never T squarings."""
    k_int = int.from_bytes(sk.k, "big")
    if k_int >= pk.group.n:
        raise KeyEmbeddingError("key does not fit below the modulus")
    p1 = ske_enc(sk.k, m, rng)
    mask = pow_mod(pk.r, sk.a, pk.group, counter)
    p2 = (k_int + mask) % pk.group.n
    return TlpPuzzle(p1=p1, p2=p2)


def tlp_solve(
    pk: TlpPublic,
    p: TlpPuzzle,
    counter: OpCounter | None = None,
) -> tuple[bytes, int]:
    """Unlock by T sequential squarings; returns (message, squaring count)."""
    report = repeated_square(pk.r, pk.t, pk.group, counter)
    k_int = (p.p2 - report.result) % pk.group.n
    try:
        k = k_int.to_bytes(KEY_LEN, "big")
    except OverflowError:
        raise DecryptionError("recovered key out of range") from None
    m = ske_dec(k, p.p1)
    return m, report.count


def puzzle_to_manifest(pk: TlpPublic, p: TlpPuzzle) -> str:
    """Serialize a single puzzle with its public parameters."""
    pairs = [
        ("n", manifest.int_to_hex(pk.group.n)),
        ("t", manifest.int_to_hex(pk.t)),
        ("r", manifest.int_to_hex(pk.r)),
        ("p1", manifest.bytes_to_hex(p.p1.to_bytes())),
        ("p2", manifest.int_to_hex(p.p2)),
    ]
    return manifest.emit(pairs)


def puzzle_from_manifest(text: str) -> tuple[TlpPublic, TlpPuzzle]:
    fields = manifest.parse(text)
    n = manifest.hex_to_int(manifest.need(fields, "n"))
    group = RsaGroup(n=n, bits=n.bit_length())
    pk = TlpPublic(
        group=group,
        t=manifest.hex_to_int(manifest.need(fields, "t")),
        r=manifest.hex_to_int(manifest.need(fields, "r")),
    )
    p = TlpPuzzle(
        p1=Ciphertext.from_bytes(manifest.hex_to_bytes(manifest.need(fields, "p1"))),
        p2=manifest.hex_to_int(manifest.need(fields, "p2")),
    )
    return pk, p
