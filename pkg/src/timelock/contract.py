"""In-process escrow contract for delegated puzzle solving.

The server deposits per-link rewards; the generating helper registers
commitments; the solving helper registers (solution, witness) pairs that
get timestamped by an injected clock.  Verification checks the deadline
and the commitment opening; payment then routes each slot's coins to the
helper (valid) or back to the server (invalid or expired), exactly once.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from . import manifest
from .cedg import DeadlineSchedule
from .primitives import commit_verify, hash_digest_len


class InsufficientBalanceError(RuntimeError):
    """Transfer exceeds the source account balance."""


class AlreadySetError(RuntimeError):
    """Write-once field written twice."""


class SlotOccupiedError(RuntimeError):
    """Registration slot already holds a solution."""


class NotRegisteredError(RuntimeError):
    """Operation needs a registered solution that is not there."""


class VerifyNotRunError(RuntimeError):
    """Payment requested before verification recorded a verdict."""


class NotExpiredError(RuntimeError):
    """Expiry claimed while the deadline has not passed."""


class ManualClock:
    """Deterministic clock; exact rational time inside, whole seconds outside."""

    def __init__(self, start: "int | Fraction" = 0):
        self._t = Fraction(start)

    def now(self) -> int:
        return ceil(self._t)

    def advance(self, dt: "int | Fraction") -> None:
        if dt < 0:
            raise ValueError("clock cannot move backwards")
        self._t += Fraction(dt)

    def jump_to(self, t: "int | Fraction") -> None:
        if t < self._t:
            raise ValueError("clock cannot move backwards")
        self._t = Fraction(t)


class WallClock:
    """OS time, clamped monotone non-decreasing."""

    def __init__(self):
        self._last = 0

    def now(self) -> int:
        self._last = max(self._last, int(time.time()))
        return self._last


class CoinLedger:
    """Account balances in integer coin units; total supply is constant."""

    def __init__(self, balances: "dict[str, int] | None" = None):
        self.balances: dict[str, int] = dict(balances or {})
        if any(v < 0 for v in self.balances.values()):
            raise ValueError("balances must be non-negative")

    def balance(self, account: str) -> int:
        return self.balances.get(account, 0)

    def total(self) -> int:
        return sum(self.balances.values())

    def transfer(self, src: str, dst: str, amount: int) -> None:
        if amount < 0:
            raise ValueError("transfer amount must be non-negative")
        if self.balance(src) < amount:
            raise InsufficientBalanceError(f"{src} holds {self.balance(src)} < {amount}")
        self.balances[src] = self.balance(src) - amount
        self.balances[dst] = self.balance(dst) + amount


@dataclass(frozen=True)
class Registration:
    m_star: bytes
    pi: bytes
    t: int


class EscrowContract:
    """One deployed escrow; all mutating calls are totally ordered."""

    def __init__(
        self,
        ledger: CoinLedger,
        clock,
        server: str,
        helper: str,
        coins: "list[int]",
        t0: int,
        deadlines: "DeadlineSchedule | list[int]",
        address: str = "escrow-1",
        hash_profile: str = "sha512",
    ):
        if any(c < 0 for c in coins):
            raise ValueError("slot rewards must be non-negative")
        if isinstance(deadlines, DeadlineSchedule):
            deadlines = list(deadlines.deadlines)
        if len(deadlines) != len(coins):
            raise ValueError("deadline and reward vectors must match")
        hash_digest_len(hash_profile)
        self.ledger = ledger
        self.clock = clock
        self.address = address
        self.server = server
        self.helper = helper
        self.hash_profile = hash_profile
        self.coins = tuple(coins)
        self.t0 = t0
        self.deadlines = tuple(deadlines)
        self.z = len(coins)
        self.deposit = sum(coins)
        self.commitments: "tuple[bytes, ...] | None" = None
        self.registrations: "list[Registration | None]" = [None] * self.z
        self.v: "list[bool | None]" = [None] * self.z
        self.u: "list[bool | None]" = [None] * self.z
        self.events: list[tuple[str, tuple, int]] = []
        ledger.transfer(server, address, self.deposit)
        self._log("deploy", (server, helper, self.coins, t0, self.deadlines))

    def _log(self, op: str, args: tuple) -> None:
        self.events.append((op, args, self.clock.now()))

    def _slot(self, j: int) -> int:
        if not 1 <= j <= self.z:
            raise IndexError(f"link index {j} outside 1..{self.z}")
        return j - 1

    def register_commitments(self, gs: "list[bytes] | tuple[bytes, ...]") -> None:
        if self.commitments is not None:
            raise AlreadySetError("commitments are write-once")
        if len(gs) != self.z:
            raise ValueError("commitment vector length must match slot count")
        self.commitments = tuple(bytes(g) for g in gs)
        self._log("register_commitments", (self.commitments,))

    def register_solution(self, j: int, m_star: bytes, pi: bytes) -> int:
        """Store (m_star, pi) with the current time; first write wins."""
        i = self._slot(j)
        if self.registrations[i] is not None:
            raise SlotOccupiedError(f"slot {j} already registered")
        t = self.clock.now()
        self.registrations[i] = Registration(m_star=bytes(m_star), pi=bytes(pi), t=t)
        self._log("register_solution", (j, bytes(m_star), bytes(pi)))
        return t

    def verify(self, j: int) -> bool:
        """v_j = on time (t_j <= deadline) AND the commitment opens."""
        i = self._slot(j)
        if self.commitments is None:
            raise NotRegisteredError("commitments not registered")
        reg = self.registrations[i]
        if reg is None:
            raise NotRegisteredError(f"slot {j} has no solution")
        v = reg.t <= self.deadlines[i] and commit_verify(
            self.commitments[i], reg.m_star, reg.pi, self.hash_profile
        )
        self.v[i] = v
        self._log("verify", (j, v))
        return v

    def claim_expired(self, j: int) -> bool:
        """Mark a never-registered slot failed once its deadline has passed."""
        i = self._slot(j)
        if self.registrations[i] is not None:
            raise SlotOccupiedError(f"slot {j} is registered; verify it instead")
        if self.clock.now() <= self.deadlines[i]:
            raise NotExpiredError(f"slot {j} deadline not passed")
        self.v[i] = False
        self._log("claim_expired", (j,))
        return False

    def pay(self, j: int) -> bool:
        """Settle slot j once: coins to helper iff v_j, else refund to server."""
        i = self._slot(j)
        if self.u[i] is not None:
            return self.u[i]
        if self.v[i] is None:
            raise VerifyNotRunError(f"slot {j} not verified")
        if self.v[i]:
            self.ledger.transfer(self.address, self.helper, self.coins[i])
            self.u[i] = True
        else:
            self.ledger.transfer(self.address, self.server, self.coins[i])
            self.u[i] = False
        self._log("pay", (j, self.u[i]))
        return self.u[i]

    def dump(self) -> str:
        """Contract state as a manifest (inspection and restore)."""
        pairs = [
            ("address", self.address),
            ("server", self.server),
            ("helper", self.helper),
            ("t0", manifest.int_to_hex(self.t0)),
            ("z", manifest.int_to_hex(self.z)),
        ]
        if self.hash_profile != "sha512":
            pairs.append(("hash", self.hash_profile))
        manifest.put_vector(pairs, "coins", [manifest.int_to_hex(c) for c in self.coins])
        manifest.put_vector(pairs, "td", [manifest.int_to_hex(d) for d in self.deadlines])
        if self.commitments is not None:
            pairs.append(("gset", "1"))
            manifest.put_vector(pairs, "g", [manifest.bytes_to_hex(g) for g in self.commitments])
        for i, reg in enumerate(self.registrations):
            if reg is not None:
                j = i + 1
                pairs.append((f"m.{j}", manifest.bytes_to_hex(reg.m_star)))
                pairs.append((f"pi.{j}", manifest.bytes_to_hex(reg.pi)))
                pairs.append((f"rt.{j}", manifest.int_to_hex(reg.t)))
        for name, vec in (("v", self.v), ("u", self.u)):
            for i, bit in enumerate(vec):
                if bit is not None:
                    pairs.append((f"{name}.{i + 1}", "1" if bit else "0"))
        return manifest.emit(pairs)

    @classmethod
    def restore(cls, text: str, ledger: CoinLedger, clock) -> "EscrowContract":
        """Rebuild from dump(); balances stay wherever the ledger has them."""
        fields = manifest.parse(text)
        obj = cls.__new__(cls)
        obj.ledger = ledger
        obj.clock = clock
        obj.address = manifest.need(fields, "address")
        obj.server = manifest.need(fields, "server")
        obj.helper = manifest.need(fields, "helper")
        obj.t0 = manifest.hex_to_int(manifest.need(fields, "t0"))
        obj.hash_profile = fields.get("hash", "sha512")
        hash_digest_len(obj.hash_profile)
        obj.coins = tuple(manifest.hex_to_int(v) for v in manifest.get_vector(fields, "coins"))
        obj.deadlines = tuple(manifest.hex_to_int(v) for v in manifest.get_vector(fields, "td"))
        obj.z = len(obj.coins)
        if obj.z != manifest.hex_to_int(manifest.need(fields, "z")):
            raise manifest.ManifestError("z disagrees with reward vector")
        obj.deposit = sum(obj.coins)
        if fields.get("gset") == "1":
            gs = manifest.get_vector(fields, "g")
            obj.commitments = tuple(manifest.hex_to_bytes(g) for g in gs)
        else:
            obj.commitments = None
        obj.registrations = [None] * obj.z
        obj.v = [None] * obj.z
        obj.u = [None] * obj.z
        for j in range(1, obj.z + 1):
            if f"m.{j}" in fields:
                obj.registrations[j - 1] = Registration(
                    m_star=manifest.hex_to_bytes(fields[f"m.{j}"]),
                    pi=manifest.hex_to_bytes(fields[f"pi.{j}"]),
                    t=manifest.hex_to_int(fields[f"rt.{j}"]),
                )
            for name, vec in (("v", obj.v), ("u", obj.u)):
                if f"{name}.{j}" in fields:
                    vec[j - 1] = fields[f"{name}.{j}"] == "1"
        obj.events = []
        return obj


def deploy(
    ledger: CoinLedger,
    clock,
    server: str,
    helper: str,
    coins: "list[int]",
    t0: int,
    deadlines: "DeadlineSchedule | list[int]",
    address: str = "escrow-1",
    hash_profile: str = "sha512",
) -> EscrowContract:
    """Escrow sum(coins) from the server and open the contract."""
    return EscrowContract(
        ledger, clock, server, helper, coins, t0, deadlines, address, hash_profile
    )
