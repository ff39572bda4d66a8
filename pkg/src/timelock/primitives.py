"""Symmetric encryption, hash commitments, and the bit-string split helper.

Encryption is AES-256-GCM: stronger than the minimum the protocol needs,
deliberately, so that decrypting with a wrong key (e.g. solving chain links
out of order) surfaces as an explicit failure instead of garbage plaintext.
Commitments hash message || witness with 16-byte witnesses; the default
profile is SHA-512, with Keccak-256 available so deployments whose escrow
verifies on an EVM can use the chain's native hash end to end.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from ._keccak import keccak256
from .rng import Rng

KEY_LEN = 32
NONCE_LEN = 12
TAG_LEN = 16
WITNESS_LEN = 16
DIGEST_LEN = 64

WITNESS_BITS = 8 * WITNESS_LEN

HASH_PROFILES = {
    "sha512": (lambda data: hashlib.sha512(data).digest(), 64),
    "keccak256": (keccak256, 32),
}


class DecryptionError(ValueError):
    """Authentication failure: wrong key, tampered ciphertext, or corrupt puzzle."""


@dataclass(frozen=True)
class Ciphertext:
    """AES-GCM ciphertext; wire format is nonce || body || tag."""

    nonce: bytes
    body: bytes
    tag: bytes

    def __post_init__(self):
        if len(self.nonce) != NONCE_LEN or len(self.tag) != TAG_LEN:
            raise ValueError("bad ciphertext framing")

    def to_bytes(self) -> bytes:
        return self.nonce + self.body + self.tag

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Ciphertext":
        if len(raw) < NONCE_LEN + TAG_LEN:
            raise ValueError("ciphertext too short")
        return cls(raw[:NONCE_LEN], raw[NONCE_LEN:-TAG_LEN], raw[-TAG_LEN:])


def _check_key(k: bytes) -> None:
    if not isinstance(k, (bytes, bytearray)) or len(k) != KEY_LEN:
        raise ValueError("key must be exactly 32 bytes")


def ske_keygen(rng: Rng) -> bytes:
    """Fresh 256-bit symmetric key."""
    return rng.read(KEY_LEN)


def ske_enc(k: bytes, m: bytes, rng: Rng) -> Ciphertext:
    """Encrypt m under k with a fresh nonce drawn from rng."""
    _check_key(k)
    nonce = rng.read(NONCE_LEN)
    sealed = AESGCM(bytes(k)).encrypt(nonce, bytes(m), None)
    return Ciphertext(nonce=nonce, body=sealed[:-TAG_LEN], tag=sealed[-TAG_LEN:])


def ske_dec(k: bytes, c: Ciphertext) -> bytes:
    """Decrypt and authenticate; raises DecryptionError on any mismatch."""
    _check_key(k)
    try:
        return AESGCM(bytes(k)).decrypt(c.nonce, c.body + c.tag, None)
    except InvalidTag:
        raise DecryptionError("ciphertext failed authentication") from None


def new_witness(rng: Rng) -> bytes:
    """Fresh 128-bit commitment witness."""
    return rng.read(WITNESS_LEN)


def hash_digest_len(profile: str) -> int:
    """Digest length in bytes for a named commitment hash profile."""
    if profile not in HASH_PROFILES:
        raise ValueError(f"unknown hash profile {profile!r}")
    return HASH_PROFILES[profile][1]


def commit(m: bytes, d: bytes, profile: str = "sha512") -> bytes:
    """Commitment to m under witness d."""
    if len(d) != WITNESS_LEN:
        raise ValueError("witness must be exactly 16 bytes")
    if profile not in HASH_PROFILES:
        raise ValueError(f"unknown hash profile {profile!r}")
    return HASH_PROFILES[profile][0](bytes(m) + bytes(d))


def commit_verify(g: bytes, m: bytes, d: bytes, profile: str = "sha512") -> bool:
    """True iff g opens to (m, d).  Never raises on mismatched inputs."""
    if len(g) != hash_digest_len(profile) or len(d) != WITNESS_LEN:
        return False
    return hmac.compare_digest(g, commit(m, d, profile))


def parse(omega: int, y: bytes) -> tuple[bytes, bytes]:
    """Split y into (leading |y|-omega bits, trailing omega bits).

    omega is a bit count and must be byte-aligned here; the concatenation
    of the two parts is y.
    """
    if omega < 0 or omega % 8:
        raise ValueError("omega must be a non-negative multiple of 8 bits")
    nbytes = omega // 8
    if len(y) < nbytes:
        raise ValueError("parse underflow: value shorter than omega bits")
    if nbytes == 0:
        return y, b""
    return y[:-nbytes], y[-nbytes:]
