"""Chained time-lock puzzles with variable intervals.

Each link locks m_j || d_j || r_{j+1}: the message, a commitment witness,
and the generator needed for the next link.  Hiding the next generator
forces strictly in-order solving; the per-link commitment g_j lets anyone
verify an announced solution without solving.  Chains can be extended in
place because the final generator r_{z+1} is already embedded in link z.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import manifest
from .group_arith import OpCounter, RsaGroup, RsaTrapdoor, gen_modulus, group_from_primes, sample_unit
from .primitives import (
    Ciphertext,
    DecryptionError,
    WITNESS_BITS,
    commit,
    commit_verify,
    new_witness,
    parse,
)
from .rng import Rng
from .tlp_base import TlpPublic, TlpPuzzle, TlpSecret, sample_masking_key, tlp_gen, tlp_solve

HASH_ID = "sha512"


class ChainSolveError(RuntimeError):
    """A link failed to open; carries the 1-based link index."""

    def __init__(self, index: int, reason: str):
        super().__init__(f"link {index}: {reason}")
        self.index = index


@dataclass(frozen=True)
class ChainAux:
    """Commitment hash id and the fixed bit widths used by parse()."""

    hash_id: str
    omega1: int
    omega2: int


@dataclass(frozen=True)
class ChainPublic:
    aux: ChainAux
    group: RsaGroup
    ts: tuple[int, ...]
    r1: int

    @property
    def z(self) -> int:
        return len(self.ts)


@dataclass(frozen=True)
class ChainSecret:
    """Trapdoor plus per-link vectors.

    gens holds r_2 .. r_{z+1}: gens[j-1] is the generator hidden inside
    link j's blob (and the generator that opens link j+1).
    """

    trapdoor: RsaTrapdoor
    a_exps: tuple[int, ...]
    keys: tuple[bytes, ...]
    gens: tuple[int, ...]
    witnesses: tuple[bytes, ...]


@dataclass(frozen=True)
class ChainPuzzle:
    puzzles: tuple[TlpPuzzle, ...]
    commitments: tuple[bytes, ...]

    def __post_init__(self):
        if len(self.puzzles) != len(self.commitments):
            raise ValueError("puzzle and commitment vectors must match")

    @property
    def z(self) -> int:
        return len(self.puzzles)


@dataclass(frozen=True)
class ChainSolution:
    """Opened link: message, commitment witness, 1-based link index."""

    m: bytes
    d: bytes
    index: int


def omega_for_group(group: RsaGroup) -> int:
    """Generator field width: modulus bit length rounded up to whole bytes."""
    return 8 * ((group.bits + 7) // 8)


def _encode_element(x: int, omega1: int) -> bytes:
    return x.to_bytes(omega1 // 8, "big")


def chain_setup(
    bits: int,
    deltas: "list[int]",
    s_rate: int,
    rng: Rng,
    safe: bool = False,
    primes: tuple[int, int] | None = None,
) -> tuple[ChainPublic, ChainSecret]:
    """Keys for a z-link chain with per-link delays deltas (seconds).

    T_j = S*delta_j; z+1 generators are drawn, r_1 public and the rest
    secret until revealed link by link.
    """
    z = len(deltas)
    if z < 1:
        raise ValueError("chain needs at least one interval")
    if s_rate < 1:
        raise ValueError("squaring rate must be >= 1")
    if any(d < 0 for d in deltas):
        raise ValueError("intervals must be non-negative")
    if primes is not None:
        group, trapdoor = group_from_primes(*primes)
    else:
        group, trapdoor = gen_modulus(bits, safe=safe, rng=rng)
    ts = tuple(s_rate * d for d in deltas)
    a_exps = tuple(pow(2, t, trapdoor.phi) for t in ts)
    gens = tuple(sample_unit(group, rng) for _ in range(z + 1))
    keys = tuple(sample_masking_key(group, rng) for _ in range(z))
    witnesses = tuple(new_witness(rng) for _ in range(z))
    aux = ChainAux(hash_id=HASH_ID, omega1=omega_for_group(group), omega2=WITNESS_BITS)
    pk = ChainPublic(aux=aux, group=group, ts=ts, r1=gens[0])
    sk = ChainSecret(
        trapdoor=trapdoor, a_exps=a_exps, keys=keys, gens=gens[1:], witnesses=witnesses
    )
    return pk, sk


def _link_generator(pk: ChainPublic, sk: ChainSecret, j: int) -> int:
    """Generator that opens link j (1-based)."""
    return pk.r1 if j == 1 else sk.gens[j - 2]


def _gen_link(
    m: bytes,
    j: int,
    pk: ChainPublic,
    sk: ChainSecret,
    rng: Rng,
    counter: OpCounter | None,
    hash_profile: str = "sha512",
) -> tuple[TlpPuzzle, bytes]:
    """Lock link j (1-based): blob = m || d_j || r_{j+1}, commitment over (m, d_j)."""
    blob = m + sk.witnesses[j - 1] + _encode_element(sk.gens[j - 1], pk.aux.omega1)
    link_pk = TlpPublic(group=pk.group, t=pk.ts[j - 1], r=_link_generator(pk, sk, j))
    link_sk = TlpSecret(trapdoor=sk.trapdoor, a=sk.a_exps[j - 1], k=sk.keys[j - 1])
    puzzle = tlp_gen(blob, link_pk, link_sk, rng, counter)
    return puzzle, commit(m, sk.witnesses[j - 1], hash_profile)


def _check_keys(pk: ChainPublic, sk: ChainSecret) -> None:
    z = pk.z
    if sk.trapdoor.q1 * sk.trapdoor.q2 != pk.group.n:
        raise ValueError("secret key does not match the public modulus")
    if not (len(sk.a_exps) == len(sk.keys) == len(sk.gens) == len(sk.witnesses) == z):
        raise ValueError("secret key vectors do not match chain length")
    for t, a in zip(pk.ts, sk.a_exps):
        if a != pow(2, t, sk.trapdoor.phi):
            raise ValueError("trapdoor exponents do not match squaring counts")


def chain_gen(
    ms: "list[bytes]",
    pk: ChainPublic,
    sk: ChainSecret,
    rng: Rng,
    counter: OpCounter | None = None,
    hash_profile: str = "sha512",
) -> ChainPuzzle:
    """Lock one message per link.  Links are independent given the keys."""
    if len(ms) != pk.z:
        raise ValueError("need exactly one message per link")
    _check_keys(pk, sk)
    puzzles = []
    commitments = []
    for j, m in enumerate(ms, 1):
        puzzle, g = _gen_link(m, j, pk, sk, rng, counter, hash_profile)
        puzzles.append(puzzle)
        commitments.append(g)
    return ChainPuzzle(puzzles=tuple(puzzles), commitments=tuple(commitments))


def chain_solve(
    pk: ChainPublic,
    chain: ChainPuzzle,
    emit: "Callable[[ChainSolution], None] | None" = None,
    counter: OpCounter | None = None,
) -> tuple[list[ChainSolution], int]:
    """Open links strictly in order, emitting each solution as it appears.

    Returns all solutions plus the total squaring count (sum of T_j).
    A link that fails authentication aborts with its index: that is how
    out-of-order solving and corrupt chains surface.
    """
    if chain.z != pk.z:
        raise ValueError("chain length does not match public key")
    r = pk.r1
    solutions: list[ChainSolution] = []
    total = 0
    for j in range(1, pk.z + 1):
        link_pk = TlpPublic(group=pk.group, t=pk.ts[j - 1], r=r)
        try:
            blob, count = tlp_solve(link_pk, chain.puzzles[j - 1], counter)
        except DecryptionError as e:
            raise ChainSolveError(j, str(e)) from None
        total += count
        head, r_next = parse(pk.aux.omega1, blob)
        m, d = parse(pk.aux.omega2, head)
        sol = ChainSolution(m=m, d=d, index=j)
        solutions.append(sol)
        if emit is not None:
            emit(sol)
        r = int.from_bytes(r_next, "big")
    return solutions, total


def chain_prove(pk: ChainPublic, s: ChainSolution) -> bytes:
    """The proof for a solution is its commitment witness."""
    return s.d


def chain_verify(
    pk: ChainPublic, j: int, m: bytes, pi: bytes, g: bytes, hash_profile: str = "sha512"
) -> bool:
    """True iff g opens to (m, pi).  Position j is the caller's bookkeeping."""
    if not 1 <= j:
        raise ValueError("link index is 1-based")
    return commit_verify(g, m, pi, hash_profile)


def chain_extend_setup(
    deltas_new: "list[int]",
    s_rate: int,
    pk: ChainPublic,
    sk: ChainSecret,
    rng: Rng,
) -> tuple[ChainPublic, ChainSecret]:
    """Append z' links to existing keys.

    The already-embedded r_{z+1} becomes the first new link's generator, so
    previously issued puzzles stay valid and the extended chain still solves
    end to end.  z' = 0 returns the keys unchanged.
    """
    _check_keys(pk, sk)
    if any(d < 0 for d in deltas_new):
        raise ValueError("intervals must be non-negative")
    if s_rate < 1:
        raise ValueError("squaring rate must be >= 1")
    if not deltas_new:
        return pk, sk
    zp = len(deltas_new)
    ts_new = tuple(s_rate * d for d in deltas_new)
    a_new = tuple(pow(2, t, sk.trapdoor.phi) for t in ts_new)
    gens_new = tuple(sample_unit(pk.group, rng) for _ in range(zp))
    keys_new = tuple(sample_masking_key(pk.group, rng) for _ in range(zp))
    wit_new = tuple(new_witness(rng) for _ in range(zp))
    pk2 = ChainPublic(aux=pk.aux, group=pk.group, ts=pk.ts + ts_new, r1=pk.r1)
    sk2 = ChainSecret(
        trapdoor=sk.trapdoor,
        a_exps=sk.a_exps + a_new,
        keys=sk.keys + keys_new,
        gens=sk.gens + gens_new,
        witnesses=sk.witnesses + wit_new,
    )
    return pk2, sk2


def chain_extend_gen(
    ms_new: "list[bytes]",
    pk: ChainPublic,
    sk: ChainSecret,
    rng: Rng,
    counter: OpCounter | None = None,
    hash_profile: str = "sha512",
) -> ChainPuzzle:
    """Lock the appended links only (indices z_old+1 .. z)."""
    _check_keys(pk, sk)
    z_old = pk.z - len(ms_new)
    if z_old < 1:
        raise ValueError("extension longer than the extended key allows")
    puzzles = []
    commitments = []
    for i, m in enumerate(ms_new):
        puzzle, g = _gen_link(m, z_old + 1 + i, pk, sk, rng, counter, hash_profile)
        puzzles.append(puzzle)
        commitments.append(g)
    return ChainPuzzle(puzzles=tuple(puzzles), commitments=tuple(commitments))


def chain_append(chain: ChainPuzzle, new_links: ChainPuzzle) -> ChainPuzzle:
    """Concatenate an extension's links onto an existing chain."""
    return ChainPuzzle(
        puzzles=chain.puzzles + new_links.puzzles,
        commitments=chain.commitments + new_links.commitments,
    )


def chain_public_to_manifest(pk: ChainPublic) -> str:
    pairs = [
        ("hash", pk.aux.hash_id),
        ("n", manifest.int_to_hex(pk.group.n)),
        ("z", manifest.int_to_hex(pk.z)),
        ("omega1", manifest.int_to_hex(pk.aux.omega1)),
        ("omega2", manifest.int_to_hex(pk.aux.omega2)),
        ("r1", manifest.int_to_hex(pk.r1)),
    ]
    manifest.put_vector(pairs, "t", [manifest.int_to_hex(t) for t in pk.ts])
    return manifest.emit(pairs)


def chain_public_from_manifest(text: str) -> ChainPublic:
    fields = manifest.parse(text)
    n = manifest.hex_to_int(manifest.need(fields, "n"))
    group = RsaGroup(n=n, bits=n.bit_length())
    aux = ChainAux(
        hash_id=manifest.need(fields, "hash"),
        omega1=manifest.hex_to_int(manifest.need(fields, "omega1")),
        omega2=manifest.hex_to_int(manifest.need(fields, "omega2")),
    )
    ts = tuple(manifest.hex_to_int(v) for v in manifest.get_vector(fields, "t"))
    if len(ts) != manifest.hex_to_int(manifest.need(fields, "z")):
        raise manifest.ManifestError("z disagrees with interval vector")
    return ChainPublic(aux=aux, group=group, ts=ts, r1=manifest.hex_to_int(manifest.need(fields, "r1")))


def chain_secret_to_manifest(sk: ChainSecret) -> str:
    """Secret manifest; rs.j is the generator hidden in link j (r_{j+1})."""
    pairs = [
        ("q1", manifest.int_to_hex(sk.trapdoor.q1)),
        ("q2", manifest.int_to_hex(sk.trapdoor.q2)),
    ]
    manifest.put_vector(pairs, "a", [manifest.int_to_hex(a) for a in sk.a_exps])
    manifest.put_vector(pairs, "k", [manifest.bytes_to_hex(k) for k in sk.keys])
    manifest.put_vector(pairs, "rs", [manifest.int_to_hex(r) for r in sk.gens])
    manifest.put_vector(pairs, "d", [manifest.bytes_to_hex(d) for d in sk.witnesses])
    return manifest.emit(pairs)


def chain_secret_from_manifest(text: str) -> ChainSecret:
    fields = manifest.parse(text)
    q1 = manifest.hex_to_int(manifest.need(fields, "q1"))
    q2 = manifest.hex_to_int(manifest.need(fields, "q2"))
    return ChainSecret(
        trapdoor=RsaTrapdoor(q1=q1, q2=q2, phi=(q1 - 1) * (q2 - 1)),
        a_exps=tuple(manifest.hex_to_int(v) for v in manifest.get_vector(fields, "a")),
        keys=tuple(manifest.hex_to_bytes(v) for v in manifest.get_vector(fields, "k")),
        gens=tuple(manifest.hex_to_int(v) for v in manifest.get_vector(fields, "rs")),
        witnesses=tuple(manifest.hex_to_bytes(v) for v in manifest.get_vector(fields, "d")),
    )


def chain_to_manifest(pk: ChainPublic, chain: ChainPuzzle) -> str:
    pairs = [
        ("n", manifest.int_to_hex(pk.group.n)),
        ("z", manifest.int_to_hex(chain.z)),
        ("omega1", manifest.int_to_hex(pk.aux.omega1)),
        ("omega2", manifest.int_to_hex(pk.aux.omega2)),
        ("r1", manifest.int_to_hex(pk.r1)),
    ]
    manifest.put_vector(pairs, "t", [manifest.int_to_hex(t) for t in pk.ts])
    manifest.put_vector(pairs, "p1", [manifest.bytes_to_hex(p.p1.to_bytes()) for p in chain.puzzles])
    manifest.put_vector(pairs, "p2", [manifest.int_to_hex(p.p2) for p in chain.puzzles])
    manifest.put_vector(pairs, "g", [manifest.bytes_to_hex(g) for g in chain.commitments])
    return manifest.emit(pairs)


def chain_from_manifest(text: str) -> tuple[ChainPublic, ChainPuzzle]:
    fields = manifest.parse(text)
    n = manifest.hex_to_int(manifest.need(fields, "n"))
    group = RsaGroup(n=n, bits=n.bit_length())
    aux = ChainAux(
        hash_id=HASH_ID,
        omega1=manifest.hex_to_int(manifest.need(fields, "omega1")),
        omega2=manifest.hex_to_int(manifest.need(fields, "omega2")),
    )
    ts = tuple(manifest.hex_to_int(v) for v in manifest.get_vector(fields, "t"))
    pk = ChainPublic(aux=aux, group=group, ts=ts, r1=manifest.hex_to_int(manifest.need(fields, "r1")))
    p1s = [manifest.hex_to_bytes(v) for v in manifest.get_vector(fields, "p1")]
    p2s = [manifest.hex_to_int(v) for v in manifest.get_vector(fields, "p2")]
    gs = [manifest.hex_to_bytes(v) for v in manifest.get_vector(fields, "g")]
    if not (len(p1s) == len(p2s) == len(gs) == len(ts) == manifest.hex_to_int(manifest.need(fields, "z"))):
        raise manifest.ManifestError("link vectors disagree in length")
    chain = ChainPuzzle(
        puzzles=tuple(
            TlpPuzzle(p1=Ciphertext.from_bytes(raw), p2=p2) for raw, p2 in zip(p1s, p2s)
        ),
        commitments=tuple(gs),
    )
    return pk, chain


def commitments_to_manifest(gs: "tuple[bytes, ...] | list[bytes]") -> str:
    pairs = [("z", manifest.int_to_hex(len(gs)))]
    manifest.put_vector(pairs, "g", [manifest.bytes_to_hex(g) for g in gs])
    return manifest.emit(pairs)


def commitments_from_manifest(text: str) -> tuple[bytes, ...]:
    fields = manifest.parse(text)
    gs = tuple(manifest.hex_to_bytes(v) for v in manifest.get_vector(fields, "g"))
    if len(gs) != manifest.hex_to_int(manifest.need(fields, "z")):
        raise manifest.ManifestError("z disagrees with commitment vector")
    return gs
