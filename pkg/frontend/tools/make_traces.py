#!/usr/bin/env python3
"""Record escrow call traces together with simulator-expected outcomes.

Each trace is a timestamped call sequence against one escrow deployment
plus the slot verdicts, settlements, and final balances the in-process
simulator produces for it.  The EVM test suite replays the same calls
against the on-chain contract and demands identical results, so every
trace pins the two implementations together on one scenario.

Commitments use the contract's native keccak256 profile.  Run from the
frontend directory: python3 tools/make_traces.py
"""

import json
import random
from pathlib import Path

from timelock.contract import (
    CoinLedger,
    ManualClock,
    NotExpiredError,
    SlotOccupiedError,
    deploy,
)
from timelock.primitives import commit

OUT_DIR = Path(__file__).resolve().parent.parent / "traces"
START = 1_000
PROFILE = "keccak256"


def hex0x(b: bytes) -> str:
    return "0x" + b.hex()


class TraceBuilder:
    """One scenario: openings, commitments, and a timestamped call list."""

    def __init__(self, name, deadlines, coins, rng):
        assert len(deadlines) == len(coins)
        self.name = name
        self.deadlines = list(deadlines)
        self.coins = list(coins)
        self.rng = rng
        self.z = len(coins)
        self.ms = [rng.randbytes(rng.randint(20, 80)) for _ in range(self.z)]
        self.pis = [rng.randbytes(16) for _ in range(self.z)]
        self.gs = [commit(m, pi, PROFILE) for m, pi in zip(self.ms, self.pis)]
        self.calls = [{"op": "commitPuzzles", "t": START}]

    def register(self, j, t, m=None, pi=None):
        m = self.ms[j - 1] if m is None else m
        pi = self.pis[j - 1] if pi is None else pi
        self.calls.append(
            {"op": "registerSolution", "t": t, "j": j, "m": hex0x(m), "pi": hex0x(pi)}
        )

    def pay(self, j, t):
        self.calls.append({"op": "payOut", "t": t, "j": j})

    def replay(self):
        """Run the recorded calls through the simulator; freeze the outcome."""
        ledger = CoinLedger({"server": sum(self.coins)})
        clock = ManualClock(START)
        sc = deploy(
            ledger, clock, "server", "helper", self.coins, START,
            self.deadlines, hash_profile=PROFILE,
        )
        reverts = []
        for call in self.calls:
            clock.jump_to(call["t"])
            reverts.append(self._apply(sc, call))
        outcome = {
            "reverts": reverts,
            "v": list(sc.v),
            "u": list(sc.u),
            "helperGain": ledger.balance("helper"),
            "serverRefund": ledger.balance("server"),
            "escrowHeld": ledger.balance(sc.address),
        }
        assert outcome["helperGain"] + outcome["serverRefund"] + outcome["escrowHeld"] == sum(
            self.coins
        )
        return outcome

    def _apply(self, sc, call):
        """One call; True means the contract would revert it."""
        if call["op"] == "commitPuzzles":
            sc.register_commitments(self.gs)
            return False
        j = call["j"]
        if call["op"] == "registerSolution":
            try:
                sc.register_solution(j, bytes.fromhex(call["m"][2:]), bytes.fromhex(call["pi"][2:]))
            except (SlotOccupiedError, IndexError):
                return True
            sc.verify(j)
            return False
        assert call["op"] == "payOut"
        try:
            if sc.u[j - 1] is not None:
                return False
            if sc.registrations[j - 1] is None:
                sc.claim_expired(j)
            sc.pay(j)
        except (NotExpiredError, IndexError):
            return True
        return False

    def emit(self):
        outcome = self.replay()
        return {
            "name": self.name,
            "z": self.z,
            "start": START,
            "deadlines": self.deadlines,
            "coins": self.coins,
            "commitments": [hex0x(g) for g in self.gs],
            "calls": self.calls,
            "expected": outcome,
        }


def scripted_traces():
    traces = []

    t = TraceBuilder("ontime-single", [1010], [5], random.Random(0))
    t.register(1, 1005)
    t.pay(1, 1006)
    traces.append(t)

    t = TraceBuilder("late-single", [1010], [5], random.Random(1))
    t.register(1, 1011)
    t.pay(1, 1012)
    traces.append(t)

    t = TraceBuilder("wrong-witness", [1010], [5], random.Random(2))
    t.register(1, 1005, pi=bytes(16))
    t.pay(1, 1011)
    traces.append(t)

    t = TraceBuilder("never-registered", [1010], [5], random.Random(3))
    t.pay(1, 1011)
    traces.append(t)

    t = TraceBuilder("deadline-boundary", [1010], [5], random.Random(4))
    t.register(1, 1010)
    t.pay(1, 1010)
    traces.append(t)

    t = TraceBuilder("premature-payout", [1010, 1020], [2, 3], random.Random(5))
    t.pay(1, 1005)
    t.register(1, 1006)
    t.pay(1, 1007)
    t.pay(2, 1015)
    t.register(2, 1016)
    t.pay(2, 1021)
    t.pay(3, 1022)
    traces.append(t)

    t = TraceBuilder("double-register", [1010, 1020], [2, 3], random.Random(6))
    t.register(1, 1005)
    t.register(1, 1006)
    t.register(3, 1006, m=b"out of range", pi=bytes(16))
    t.register(2, 1007)
    t.pay(1, 1008)
    t.pay(2, 1009)
    traces.append(t)

    t = TraceBuilder("idempotent-payout", [1010, 1020], [2, 3], random.Random(7))
    t.register(1, 1005)
    t.pay(1, 1006)
    t.pay(1, 1007)
    t.pay(1, 1021)
    t.register(2, 1022)
    t.pay(2, 1023)
    t.pay(2, 1023)
    traces.append(t)

    t = TraceBuilder("mixed-three", [1010, 1020, 1030], [1, 2, 3], random.Random(8))
    t.register(1, 1005)
    t.register(2, 1025)
    t.pay(1, 1026)
    t.pay(2, 1027)
    t.pay(3, 1031)
    traces.append(t)

    t = TraceBuilder("long-message", [1010], [4], random.Random(9))
    t.ms[0] = random.Random(90).randbytes(220)
    t.gs[0] = commit(t.ms[0], t.pis[0], PROFILE)
    t.register(1, 1005)
    t.pay(1, 1006)
    traces.append(t)

    t = TraceBuilder("corrupt-message", [1010], [4], random.Random(10))
    flipped = bytes([t.ms[0][0] ^ 0x01]) + t.ms[0][1:]
    t.register(1, 1005, m=flipped)
    t.pay(1, 1011)
    traces.append(t)

    t = TraceBuilder("out-of-order-settles", [1010, 1020, 1030, 1040], [1, 1, 1, 1], random.Random(11))
    for j in (1, 2, 3, 4):
        t.register(j, 1002 + j)
    t.pay(3, 1008)
    t.pay(1, 1009)
    t.pay(4, 1010)
    t.pay(2, 1011)
    traces.append(t)

    t = TraceBuilder("zero-coin-slot", [1010, 1020], [0, 3], random.Random(12))
    t.register(1, 1005)
    t.register(2, 1006)
    t.pay(1, 1007)
    t.pay(2, 1008)
    traces.append(t)

    return traces


def random_trace(index):
    rng = random.Random(0xD1FF + index)
    z = rng.randint(1, 8)
    gaps = [rng.randint(5, 30) for _ in range(z)]
    deadlines = []
    acc = START
    for gap in gaps:
        acc += gap
        deadlines.append(acc)
    coins = [rng.randint(0, 9) for _ in range(z)]
    t = TraceBuilder(f"random-{index:02d}", deadlines, coins, rng)

    ops = []
    horizon = deadlines[-1] + 15
    for j in range(1, z + 1):
        d = deadlines[j - 1]
        outcome = rng.choice(["ontime", "ontime", "late", "wrong", "skip"])
        if outcome == "ontime":
            reg_t = rng.randint(START + 1, d)
            ops.append((reg_t, "register", j, None))
        elif outcome == "late":
            reg_t = rng.randint(d + 1, d + 10)
            ops.append((reg_t, "register", j, None))
        elif outcome == "wrong":
            reg_t = rng.randint(START + 1, d)
            ops.append((reg_t, "register", j, rng.randbytes(16)))
        if outcome != "skip" and rng.random() < 0.5:
            ops.append((rng.randint(d + 1, horizon), "pay", j, None))
        if rng.random() < 0.3:
            # early or duplicate settles probe the guard paths
            ops.append((rng.randint(START + 1, horizon), "pay", j, None))
    ops.sort(key=lambda item: item[0])
    for when, op, j, arg in ops:
        if op == "register":
            t.register(j, when, pi=arg)
        else:
            t.pay(j, when)
    if rng.random() < 0.7:
        # sweep: settle every slot after all deadlines have passed
        for j in range(1, z + 1):
            t.pay(j, horizon + j)
    return t


def main():
    OUT_DIR.mkdir(exist_ok=True)
    traces = scripted_traces()
    traces.extend(random_trace(i) for i in range(len(traces), 25))
    assert len(traces) == 25
    for i, builder in enumerate(traces):
        data = builder.emit()
        path = OUT_DIR / f"trace-{i:02d}.json"
        path.write_text(json.dumps(data, indent=1) + "\n")
        settled = sum(1 for u in data["expected"]["u"] if u is not None)
        print(
            f"{path.name}  {data['name']:<22} z={data['z']} calls={len(data['calls'])} "
            f"settled={settled} reverts={sum(data['expected']['reverts'])}"
        )


if __name__ == "__main__":
    main()
