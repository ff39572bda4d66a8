"""Modular big-integer arithmetic over an RSA group.

Prime and modulus generation with a deterministic seedable stream, an
instrumented repeated-squaring engine that reports exact squaring counts,
and a counting square-and-multiply exponentiation.  GMP (via gmpy2) does
the bignum work; all protocol logic lives above this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpz

from .rng import Rng, system_rng


class GenerationExhaustedError(RuntimeError):
    """No prime found within the candidate budget."""


@dataclass(frozen=True)
class RsaGroup:
    """Multiplicative group modulo N = q1*q2."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 15 or self.n % 2 == 0:
            raise ValueError("modulus must be odd and >= 15")
        if abs(self.n.bit_length() - self.bits) > 1:
            raise ValueError("bits field disagrees with modulus size")


@dataclass(frozen=True)
class RsaTrapdoor:
    """Factorization of N and the Euler totient."""

    q1: int
    q2: int
    phi: int

    def __post_init__(self):
        if self.q1 == self.q2:
            raise ValueError("prime factors must differ")
        if self.phi != (self.q1 - 1) * (self.q2 - 1):
            raise ValueError("phi disagrees with factors")


@dataclass(frozen=True)
class SquaringReport:
    """Result of a squaring chain plus the exact number of squarings done."""

    result: int
    count: int


@dataclass
class OpCounter:
    """Tally of group operations, attributable to one protocol role.

    squarings counts sequential-clock squarings (repeated_square only);
    mulmods counts modular multiplications inside pow_mod; expmods counts
    pow_mod invocations.
    """

    squarings: int = 0
    mulmods: int = 0
    expmods: int = 0


# Squarings folded into one C-level powmod call; the exponent 2^_CHUNK
# forces a pure squaring chain, so counts stay exact.
_CHUNK = 8192
_CHUNK_EXP = mpz(2) ** _CHUNK

_SIEVE_LIMIT = 1 << 16


def _small_primes(limit: int = _SIEVE_LIMIT) -> list[int]:
    flags = bytearray([1]) * limit
    flags[0] = flags[1] = 0
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(flags[p * p :: p]))
    return [i for i in range(limit) if flags[i]]


_PRIMORIAL: mpz | None = None


def _odd_primorial() -> mpz:
    global _PRIMORIAL
    if _PRIMORIAL is None:
        _PRIMORIAL = mpz(math.prod(_small_primes()[1:]))
    return _PRIMORIAL


def is_probable_prime(n: int, rounds: int = 64, rng: Rng | None = None) -> bool:
    """Miller-Rabin with rng-chosen bases."""
    n = int(n)
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    rng = rng if rng is not None else system_rng()
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    nz, dz = mpz(n), mpz(d)
    for _ in range(rounds):
        a = 2 + rng.randint_below(n - 3)
        x = gmpy2.powmod(a, dz, nz)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = (x * x) % nz
            if x == n - 1:
                break
        else:
            return False
    return True


def _sieve_pass(x: mpz) -> bool:
    if x < _SIEVE_LIMIT:
        return True
    return gmpy2.gcd(x, _odd_primorial()) == 1


def _gen_prime(bits: int, rng: Rng, safe: bool) -> int:
    """Random prime with the top two bits set; safe means (p-1)/2 also prime."""
    if bits < 8:
        raise ValueError("prime size must be >= 8 bits")
    budget = 4000 * bits if safe else 200 * bits
    top = (1 << (bits - 1)) | (1 << (bits - 2))
    for _ in range(budget):
        cand = mpz(rng.randbits(bits) | top | (3 if safe else 1))
        if not _sieve_pass(cand):
            continue
        if safe:
            s = cand >> 1
            if not _sieve_pass(s):
                continue
            if not is_probable_prime(cand, 1, rng):
                continue
            if not is_probable_prime(s, 1, rng):
                continue
            if is_probable_prime(cand, 64, rng) and is_probable_prime(s, 64, rng):
                return int(cand)
        else:
            if is_probable_prime(cand, 1, rng) and is_probable_prime(cand, 64, rng):
                return int(cand)
    raise GenerationExhaustedError(f"no {'safe ' if safe else ''}prime in budget")


def group_from_primes(q1: int, q2: int) -> tuple[RsaGroup, RsaTrapdoor]:
    """Build a group from explicit primes.  Test hook for toy moduli."""
    check_rng = Rng(b"group-from-primes-check")
    for q in (q1, q2):
        if not is_probable_prime(q, 64, check_rng):
            raise ValueError(f"{q} is not prime")
    if q1 == q2:
        raise ValueError("prime factors must differ")
    n = q1 * q2
    return RsaGroup(n=n, bits=n.bit_length()), RsaTrapdoor(q1=q1, q2=q2, phi=(q1 - 1) * (q2 - 1))


def gen_modulus(
    bits: int,
    seed: bytes | None = None,
    safe: bool = False,
    rng: Rng | None = None,
) -> tuple[RsaGroup, RsaTrapdoor]:
    """Generate N = q1*q2 with bit length exactly `bits`.

    The seed drives a deterministic stream; with seed and rng both absent
    the stream comes from OS entropy.
    """
    if bits < 16:
        raise ValueError("modulus size must be >= 16 bits")
    if rng is None:
        rng = Rng(seed) if seed is not None else system_rng()
    b1 = bits - bits // 2
    b2 = bits // 2
    q1 = _gen_prime(b1, rng, safe)
    q2 = _gen_prime(b2, rng, safe)
    while q2 == q1:
        q2 = _gen_prime(b2, rng, safe)
    n = q1 * q2
    return RsaGroup(n=n, bits=n.bit_length()), RsaTrapdoor(q1=q1, q2=q2, phi=(q1 - 1) * (q2 - 1))


def pow_mod(base: int, exp: int, group: RsaGroup, counter: OpCounter | None = None) -> int:
    """base^exp mod N by left-to-right square-and-multiply.

    The explicit loop (rather than a single C call) keeps the modular
    multiplication count observable; exponents here are always short or
    trapdoor-sized, never the 2^T solving path.
    """
    if not 0 <= base < group.n:
        raise ValueError("base out of range")
    if exp < 0:
        raise ValueError("exponent must be non-negative")
    if counter is not None:
        counter.expmods += 1
    if exp == 0:
        return 1
    n = mpz(group.n)
    b = mpz(base)
    acc = b
    muls = 0
    for i in range(exp.bit_length() - 2, -1, -1):
        acc = (acc * acc) % n
        muls += 1
        if (exp >> i) & 1:
            acc = (acc * b) % n
            muls += 1
    if counter is not None:
        counter.mulmods += muls
    return int(acc)


def repeated_square(
    r: int, t: int, group: RsaGroup, counter: OpCounter | None = None
) -> SquaringReport:
    """r^(2^t) mod N by t sequential squarings.

    Strictly sequential: each square depends on the previous one.  Squarings
    run in C-level chunks for speed; the count is exact.
    """
    if not 0 <= r < group.n:
        raise ValueError("element out of range")
    if t < 0:
        raise ValueError("squaring count must be non-negative")
    n = mpz(group.n)
    x = mpz(r)
    done = 0
    while t - done >= _CHUNK:
        x = gmpy2.powmod(x, _CHUNK_EXP, n)
        done += _CHUNK
    rem = t - done
    if rem:
        x = gmpy2.powmod(x, mpz(2) ** rem, n)
        done += rem
    if counter is not None:
        counter.squarings += done
    return SquaringReport(result=int(x), count=done)


def sample_unit(group: RsaGroup, rng: Rng) -> int:
    """Uniform element of the unit group (gcd with N is 1)."""
    while True:
        x = 1 + rng.randint_below(group.n - 1)
        if math.gcd(x, group.n) == 1:
            return x
