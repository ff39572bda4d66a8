"""Delegated time-lock workflow across five roles.

The client encrypts its messages under its own key and hands the
ciphertexts to a generating helper; the server prices the delays, deploys
the escrow, and later decrypts what the solving helper registered.  Role
boundaries are explicit: every cross-role payload lands in a transcript,
and every role accumulates its own operation counters, so the workload
split and the privacy of plaintexts are directly testable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import manifest
from .cedg import (
    HelperProfile,
    NetworkDelayParams,
    DeadlineSchedule,
    cedg_derived,
    cedg_paper,
    schedule,
)
from .contract import (
    CoinLedger,
    EscrowContract,
    ManualClock,
    NotRegisteredError,
    VerifyNotRunError,
    deploy,
)
from .group_arith import OpCounter
from .gctlp import (
    ChainPublic,
    ChainPuzzle,
    ChainSolution,
    chain_gen,
    chain_public_to_manifest,
    chain_setup,
    chain_solve,
    chain_to_manifest,
)
from .primitives import Ciphertext, ske_dec, ske_enc, ske_keygen
from .rng import Rng

ROLES = ("client", "server", "helper_c", "helper_s", "contract")

# t0 defaults to deploy-time now plus this many network-delay bounds.
DEFAULT_LEAD_FACTOR = 2


@dataclass(frozen=True)
class ClientKeys:
    """Public part is just the delay vector; csk stays with client and server."""

    cpk: tuple[int, ...]
    csk: bytes


@dataclass(frozen=True)
class EncodedMessages:
    """Client-encrypted payloads and the release time for the chain."""

    m_star: tuple[Ciphertext, ...]
    t0: int


class RoleTranscript:
    """Append-only record of the byte payloads a role sent and received."""

    def __init__(self, role: str):
        self.role = role
        self.messages: list[tuple[str, bytes]] = []

    def record(self, direction: str, payload: bytes) -> None:
        if direction not in ("in", "out"):
            raise ValueError("direction must be 'in' or 'out'")
        self.messages.append((direction, bytes(payload)))

    def all_bytes(self) -> bytes:
        return b"".join(p for _, p in self.messages)


class Transcripts:
    """One transcript per role, with a send() that records both ends."""

    def __init__(self):
        self.by_role = {role: RoleTranscript(role) for role in ROLES}

    def __getitem__(self, role: str) -> RoleTranscript:
        return self.by_role[role]

    def send(self, src: str, dst: str, payload: bytes) -> None:
        self.by_role[src].record("out", payload)
        self.by_role[dst].record("in", payload)


def new_counters() -> dict[str, OpCounter]:
    return {role: OpCounter() for role in ROLES}


def client_setup(deltas: "list[int]", rng: Rng) -> ClientKeys:
    """Draw the client's symmetric key; the public part is the delay vector."""
    return ClientKeys(cpk=tuple(deltas), csk=ske_keygen(rng))


def client_delegate(
    ms: "list[bytes]",
    keys: ClientKeys,
    rng: Rng,
    clock,
    upsilon: int,
    lead: "int | None" = None,
) -> EncodedMessages:
    """Encrypt each message independently and fix the release time t0."""
    if len(ms) != len(keys.cpk):
        raise ValueError("need exactly one message per delay")
    if lead is None:
        lead = DEFAULT_LEAD_FACTOR * upsilon
    t0 = clock.now() + lead
    m_star = tuple(ske_enc(keys.csk, m, rng) for m in ms)
    return EncodedMessages(m_star=m_star, t0=t0)


def server_delegate(
    cedg_choice: str,
    s_rate: int,
    deltas: "list[int]",
    aux: HelperProfile,
    helper_addr: str,
    t0: int,
    upsilon: int,
    coins: "list[int]",
    ledger: CoinLedger,
    clock,
    server_addr: str,
    address: str = "escrow-1",
    hash_profile: str = "sha512",
) -> tuple[EscrowContract, DeadlineSchedule]:
    """Price the delays for the chosen helper, schedule deadlines, deploy escrow."""
    if cedg_choice == "paper":
        psis = [cedg_paper(aux.toc, s_rate, d, aux) for d in deltas]
    elif cedg_choice == "derived":
        psis = [cedg_derived(s_rate, d, aux) for d in deltas]
    else:
        raise ValueError(f"unknown extra-delay estimator {cedg_choice!r}")
    sched = schedule(t0, deltas, psis, upsilon)
    sc = deploy(
        ledger, clock, server_addr, helper_addr, coins, t0, sched, address, hash_profile
    )
    return sc, sched


def helper_c_run(
    enc: EncodedMessages,
    bits: int,
    deltas: "list[int]",
    s_rate: int,
    rng: Rng,
    sc: EscrowContract,
    counter: "OpCounter | None" = None,
    safe: bool = False,
    primes: "tuple[int, int] | None" = None,
) -> tuple[ChainPublic, ChainPuzzle]:
    """Build the chain over the client's ciphertexts and publish commitments.

    Commitments use the escrow's hash profile so an EVM-backed deployment
    verifies them with its native hash.
    """
    ms = [c.to_bytes() for c in enc.m_star]
    pk, sk = chain_setup(bits, deltas, s_rate, rng, safe=safe, primes=primes)
    chain = chain_gen(ms, pk, sk, rng, counter, hash_profile=sc.hash_profile)
    sc.register_commitments(list(chain.commitments))
    return pk, chain


def helper_s_run(
    psis: "list[Fraction] | tuple[Fraction, ...]",
    aux: HelperProfile,
    s_rate: int,
    pk: ChainPublic,
    chain: ChainPuzzle,
    sc: EscrowContract,
    expected_coins: "list[int]",
    clock: ManualClock,
    counter: "OpCounter | None" = None,
    transcript: "RoleTranscript | None" = None,
    late_extra: "dict[int, int] | None" = None,
) -> int:
    """Check the offer, then solve and register each solution as it opens.

    Returns 0 without touching a single puzzle when any slot pays less than
    expected or any extra delay is too small for this helper's speed.  The
    clock advances by the exact solving time T_j/s_id per link; late_extra
    injects additional seconds before a link's registration (demo hook for
    the refund path).
    """
    if len(expected_coins) != sc.z:
        raise ValueError("expected reward vector length must match slot count")
    if any(offered < want for offered, want in zip(sc.coins, expected_coins)):
        return 0
    for t, psi in zip(pk.ts, psis):
        if Fraction(t, aux.s_id) > Fraction(t, s_rate) + Fraction(psi):
            return 0
    late = late_extra or {}
    clock.jump_to(max(Fraction(clock.now()), Fraction(sc.t0 + aux.avail_offset)))

    def register(sol: ChainSolution) -> None:
        clock.advance(Fraction(pk.ts[sol.index - 1], aux.s_id))
        if sol.index in late:
            clock.advance(late[sol.index])
        sc.register_solution(sol.index, sol.m, sol.d)
        if transcript is not None:
            transcript.record("out", sol.m + sol.d)

    chain_solve(pk, chain, emit=register, counter=counter)
    return 1


def retrieve(csk: bytes, sc: EscrowContract, j: int) -> bytes:
    """Decrypt the registered ciphertext for slot j with the client key."""
    if not 1 <= j <= sc.z:
        raise IndexError(f"link index {j} outside 1..{sc.z}")
    reg = sc.registrations[j - 1]
    if reg is None:
        raise NotRegisteredError(f"slot {j} has no solution")
    if sc.v[j - 1] is None:
        raise VerifyNotRunError(f"slot {j} not verified")
    return ske_dec(csk, Ciphertext.from_bytes(reg.m_star))


@dataclass
class DemoConfig:
    """Scenario for a full delegated run under a simulated clock."""

    deltas: list[int]
    s_rate: int
    coins: list[int]
    expected_coins: list[int]
    seed: bytes
    bits: int = 512
    helper: HelperProfile = field(default_factory=HelperProfile)
    delay: NetworkDelayParams = field(default_factory=lambda: NetworkDelayParams(0, 0))
    cedg_choice: str = "derived"
    messages: "list[bytes] | None" = None
    late_extra: dict[int, int] = field(default_factory=dict)
    start: int = 0
    lead: "int | None" = None
    primes: "tuple[int, int] | None" = None

    def __post_init__(self):
        z = len(self.deltas)
        if not (len(self.coins) == len(self.expected_coins) == z):
            raise ValueError("coins and expected_coins must match the delay vector")
        if self.messages is not None and len(self.messages) != z:
            raise ValueError("need exactly one message per delay")


def demo_config_to_manifest(cfg: DemoConfig) -> str:
    pairs = [
        ("bits", manifest.int_to_hex(cfg.bits)),
        ("s", manifest.int_to_hex(cfg.s_rate)),
        ("sid", manifest.int_to_hex(cfg.helper.s_id)),
        ("offset", manifest.int_to_hex(cfg.helper.avail_offset)),
        ("window", manifest.int_to_hex(cfg.delay.window_size)),
        ("waitu", manifest.int_to_hex(cfg.delay.wait_u)),
        ("cedg", cfg.cedg_choice),
        ("seed", manifest.bytes_to_hex(cfg.seed)),
        ("start", manifest.int_to_hex(cfg.start)),
    ]
    if cfg.lead is not None:
        pairs.append(("lead", manifest.int_to_hex(cfg.lead)))
    manifest.put_vector(pairs, "delta", [manifest.int_to_hex(d) for d in cfg.deltas])
    manifest.put_vector(pairs, "coins", [manifest.int_to_hex(c) for c in cfg.coins])
    manifest.put_vector(pairs, "expect", [manifest.int_to_hex(c) for c in cfg.expected_coins])
    if cfg.messages is not None:
        manifest.put_vector(pairs, "msg", [manifest.bytes_to_hex(m) for m in cfg.messages])
    for j in sorted(cfg.late_extra):
        pairs.append((f"late.{j}", manifest.int_to_hex(cfg.late_extra[j])))
    return manifest.emit(pairs)


def demo_config_from_manifest(text: str) -> DemoConfig:
    fields = manifest.parse(text)
    msgs = manifest.get_vector(fields, "msg")
    late: dict[int, int] = {}
    for key, value in fields.items():
        head, dot, idx = key.partition(".")
        if head == "late" and dot:
            late[int(idx)] = manifest.hex_to_int(value)
    return DemoConfig(
        deltas=[manifest.hex_to_int(v) for v in manifest.get_vector(fields, "delta")],
        s_rate=manifest.hex_to_int(manifest.need(fields, "s")),
        coins=[manifest.hex_to_int(v) for v in manifest.get_vector(fields, "coins")],
        expected_coins=[manifest.hex_to_int(v) for v in manifest.get_vector(fields, "expect")],
        seed=manifest.hex_to_bytes(manifest.need(fields, "seed")),
        bits=manifest.hex_to_int(manifest.need(fields, "bits")),
        helper=HelperProfile(
            s_id=manifest.hex_to_int(manifest.need(fields, "sid")),
            avail_offset=manifest.hex_to_int(manifest.need(fields, "offset")),
        ),
        delay=NetworkDelayParams(
            window_size=manifest.hex_to_int(manifest.need(fields, "window")),
            wait_u=manifest.hex_to_int(manifest.need(fields, "waitu")),
        ),
        cedg_choice=manifest.need(fields, "cedg"),
        messages=[manifest.hex_to_bytes(m) for m in msgs] if msgs else None,
        late_extra=late,
        start=manifest.hex_to_int(manifest.need(fields, "start")),
        lead=manifest.hex_to_int(fields["lead"]) if "lead" in fields else None,
    )


@dataclass
class LinkOutcome:
    index: int
    deadline: int
    t_reg: "int | None"
    v: bool
    u: bool
    coins: int
    retrieved: "bytes | None"


@dataclass
class DemoReport:
    """Structured outcome of one delegated run."""

    q: int
    t0: int
    links: list[LinkOutcome]
    counters: dict[str, OpCounter]
    balances: dict[str, int]
    retrieved: "list[bytes | None]"
    messages: list[bytes]
    transcripts: Transcripts

    @property
    def all_delivered(self) -> bool:
        return all(
            link.v and link.u and out == m
            for link, out, m in zip(self.links, self.retrieved, self.messages)
        )

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "t0": self.t0,
            "all_delivered": self.all_delivered,
            "links": [
                {
                    "j": link.index,
                    "deadline": link.deadline,
                    "t_reg": link.t_reg,
                    "v": int(link.v),
                    "u": int(link.u),
                    "coins": link.coins,
                    "retrieved": link.retrieved.hex() if link.retrieved is not None else None,
                }
                for link in self.links
            ],
            "counters": {
                role: {"squarings": c.squarings, "mulmods": c.mulmods, "expmods": c.expmods}
                for role, c in self.counters.items()
            },
            "balances": dict(self.balances),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def run_demo(cfg: DemoConfig) -> DemoReport:
    """Execute the full delegation workflow under a simulated clock."""
    rng = Rng(cfg.seed)
    clock = ManualClock(cfg.start)
    ledger = CoinLedger({"server": sum(cfg.coins)})
    transcripts = Transcripts()
    counters = new_counters()
    upsilon = cfg.delay.upsilon
    z = len(cfg.deltas)

    keys = client_setup(cfg.deltas, rng.derive(b"client"))
    transcripts.send("client", "server", keys.csk)
    if cfg.messages is not None:
        ms = [bytes(m) for m in cfg.messages]
    else:
        msg_rng = rng.derive(b"messages")
        ms = [msg_rng.read(32) for _ in range(z)]
    enc = client_delegate(ms, keys, rng.derive(b"client-enc"), clock, upsilon, cfg.lead)
    for ct in enc.m_star:
        transcripts.send("client", "helper_c", ct.to_bytes())
    transcripts.send("client", "helper_c", str(enc.t0).encode())
    transcripts.send("client", "server", str(enc.t0).encode())

    sc, sched = server_delegate(
        cfg.cedg_choice,
        cfg.s_rate,
        cfg.deltas,
        cfg.helper,
        "helper",
        enc.t0,
        upsilon,
        cfg.coins,
        ledger,
        clock,
        "server",
    )

    pk, chain = helper_c_run(
        enc,
        cfg.bits,
        cfg.deltas,
        cfg.s_rate,
        rng.derive(b"helper_c"),
        sc,
        counters["helper_c"],
        primes=cfg.primes,
    )
    transcripts.send("helper_c", "contract", b"".join(chain.commitments))
    transcripts.send("helper_c", "helper_s", chain_public_to_manifest(pk).encode())
    transcripts.send("helper_c", "helper_s", chain_to_manifest(pk, chain).encode())

    q = helper_s_run(
        sched.psis,
        cfg.helper,
        cfg.s_rate,
        pk,
        chain,
        sc,
        cfg.expected_coins,
        clock,
        counters["helper_s"],
        transcripts["helper_s"],
        cfg.late_extra,
    )

    links: list[LinkOutcome] = []
    retrieved: "list[bytes | None]" = []
    for j in range(1, z + 1):
        if sc.registrations[j - 1] is not None:
            v = sc.verify(j)
        else:
            clock.jump_to(max(clock.now(), sc.deadlines[j - 1] + 1))
            v = sc.claim_expired(j)
        u = sc.pay(j)
        out = None
        if sc.registrations[j - 1] is not None:
            out = retrieve(keys.csk, sc, j)
            transcripts.send("contract", "server", sc.registrations[j - 1].m_star)
        retrieved.append(out)
        links.append(
            LinkOutcome(
                index=j,
                deadline=sc.deadlines[j - 1],
                t_reg=sc.registrations[j - 1].t if sc.registrations[j - 1] else None,
                v=v,
                u=u,
                coins=sc.coins[j - 1],
                retrieved=out,
            )
        )

    parties = ("server", "helper", sc.address)
    return DemoReport(
        q=q,
        t0=enc.t0,
        links=links,
        counters=counters,
        balances={name: ledger.balance(name) for name in parties},
        retrieved=retrieved,
        messages=ms,
        transcripts=transcripts,
    )


def run_combine_demo(
    delta_releases: tuple[int, int],
    s_rate: int,
    m1: bytes,
    m2: bytes,
    rng: Rng,
    bits: int = 512,
    primes: "tuple[int, int] | None" = None,
) -> dict:
    """Two-client merge: a second message joins an existing one-link chain.

    Client 1's chain releases m1 after delta_releases[0] seconds; client 2
    wants m2 released at the later absolute time delta_releases[1].  Rather
    than a second chain, the first chain is extended with one link whose
    interval is the difference, so a single solver serves both.
    """
    from .gctlp import chain_append, chain_extend_gen, chain_extend_setup, chain_verify

    d1, d2 = delta_releases
    if not 0 <= d1 < d2:
        raise ValueError("second release must be strictly later")
    pk1, sk1 = chain_setup(bits, [d1], s_rate, rng, primes=primes)
    chain1 = chain_gen([m1], pk1, sk1, rng)
    pk2, sk2 = chain_extend_setup([d2 - d1], s_rate, pk1, sk1, rng)
    new_links = chain_extend_gen([m2], pk2, sk2, rng)
    full = chain_append(chain1, new_links)
    counter = OpCounter()
    sols, total = chain_solve(pk2, full, counter=counter)
    release_offsets = []
    acc = 0
    for t in pk2.ts:
        acc += t
        release_offsets.append(Fraction(acc, s_rate))
    return {
        "messages_ok": [sols[0].m == m1, sols[1].m == m2],
        "commitments_ok": [
            chain_verify(pk2, s.index, s.m, s.d, full.commitments[s.index - 1]) for s in sols
        ],
        "release_offsets": release_offsets,
        "per_link_counts": list(pk2.ts),
        "total_squarings": total,
    }
