"""Squaring-rate calibration and protocol timing.

Calibration runs the exact same chunked squaring engine the solver uses,
so a locally measured rate S translates directly into wall-clock delay
when T = S*delta puzzles are solved on the same host.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import platform
import time
from contextlib import contextmanager
from dataclasses import dataclass

from .contract import CoinLedger, ManualClock
from .cedg import HelperProfile, NetworkDelayParams
from .group_arith import OpCounter, gen_modulus, group_from_primes, repeated_square, sample_unit
from .gctlp import chain_gen, chain_setup, chain_solve, chain_verify
from .rng import Rng
from .tlp_base import tlp_gen, tlp_setup, tlp_solve
from . import edtlp

_WARMUP_SQUARINGS = 1 << 13
_SLICE_SQUARINGS = 1 << 14

CSV_COLUMNS = ("scheme", "z", "phase", "seconds", "squarings")


@dataclass(frozen=True)
class SquaringRate:
    """Measured sequential squaring throughput at a given modulus size."""

    bits: int
    rate: float
    duration: float
    count: int


@dataclass(frozen=True)
class PhaseTiming:
    name: str
    seconds: float
    squarings: int


@dataclass(frozen=True)
class TimingReport:
    scheme: str
    z: int
    phases: tuple[PhaseTiming, ...]

    @property
    def total_squarings(self) -> int:
        return sum(p.squarings for p in self.phases)

    def phase(self, name: str) -> PhaseTiming:
        for p in self.phases:
            if p.name == name:
                return p
        raise KeyError(name)


@contextmanager
def _pinned_cpu():
    """Pin to one logical CPU during measurement where the platform allows."""
    try:
        original = os.sched_getaffinity(0)
        os.sched_setaffinity(0, {min(original)})
    except (AttributeError, OSError):
        original = None
    try:
        yield
    finally:
        if original is not None:
            try:
                os.sched_setaffinity(0, original)
            except OSError:
                pass


def calibrate(
    bits: int,
    duration: float,
    rng: Rng,
    primes: "tuple[int, int] | None" = None,
) -> SquaringRate:
    """Measure squarings/second over at least `duration` seconds of squaring."""
    if duration < 1:
        raise ValueError("measurement must cover at least one second")
    if primes is not None:
        group, _ = group_from_primes(*primes)
    else:
        group, _ = gen_modulus(bits, rng=rng)
    x = sample_unit(group, rng)
    with _pinned_cpu():
        x = repeated_square(x, _WARMUP_SQUARINGS, group).result
        count = 0
        start = time.perf_counter()
        while True:
            report = repeated_square(x, _SLICE_SQUARINGS, group)
            x = report.result
            count += report.count
            elapsed = time.perf_counter() - start
            if elapsed >= duration:
                break
    return SquaringRate(bits=bits, rate=count / elapsed, duration=elapsed, count=count)


def _host_fingerprint() -> str:
    u = platform.uname()
    return hashlib.sha256("|".join(u).encode()).hexdigest()[:16]


def rate_cache_load(path: str, bits: int) -> "SquaringRate | None":
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, ValueError):
        return None
    entry = data.get(f"{_host_fingerprint()}:{bits}")
    if entry is None:
        return None
    return SquaringRate(bits=bits, rate=entry["rate"], duration=entry["duration"], count=entry["count"])


def rate_cache_store(path: str, measured: SquaringRate) -> None:
    data = {}
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, ValueError):
        pass
    data[f"{_host_fingerprint()}:{measured.bits}"] = {
        "rate": measured.rate,
        "duration": measured.duration,
        "count": measured.count,
    }
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def run_timing(
    scheme: str,
    z: int,
    deltas: "list[int]",
    s_local: int,
    rng: "Rng | None" = None,
    bits: int = 2048,
    primes: "tuple[int, int] | None" = None,
) -> TimingReport:
    """Execute a full scheme run and time each phase.

    tlp means z independent puzzles timed to the same cumulative release
    schedule as the chain, which is what makes the chained saving visible
    in the squaring counts.
    """
    if len(deltas) != z:
        raise ValueError("delay vector must have length z")
    if rng is None:
        rng = Rng(b"bench")
    if scheme == "gctlp":
        return _time_gctlp(z, deltas, s_local, rng, bits, primes)
    if scheme == "tlp":
        return _time_tlp(z, deltas, s_local, rng, bits, primes)
    if scheme == "edtlp":
        return _time_edtlp(z, deltas, s_local, rng, bits, primes)
    raise ValueError(f"unknown scheme {scheme!r}")


def _time_gctlp(z, deltas, s_local, rng, bits, primes) -> TimingReport:
    ms = [rng.read(32) for _ in range(z)]
    with _pinned_cpu():
        (pk, sk), t_setup = _timed(lambda: chain_setup(bits, deltas, s_local, rng, primes=primes))
        gen_counter = OpCounter()
        chain, t_gen = _timed(lambda: chain_gen(ms, pk, sk, rng, gen_counter))
        solve_counter = OpCounter()
        (sols, total), t_solve = _timed(lambda: chain_solve(pk, chain, counter=solve_counter))
        ok, t_verify = _timed(
            lambda: all(
                chain_verify(pk, s.index, s.m, s.d, chain.commitments[s.index - 1]) for s in sols
            )
        )
    if not ok:
        raise RuntimeError("self-check failed: commitments did not verify")
    return TimingReport(
        scheme="gctlp",
        z=z,
        phases=(
            PhaseTiming("setup", t_setup, 0),
            PhaseTiming("genpuzzle", t_gen, 0),
            PhaseTiming("solve", t_solve, solve_counter.squarings),
            PhaseTiming("verify", t_verify, 0),
        ),
    )


def _time_tlp(z, deltas, s_local, rng, bits, primes) -> TimingReport:
    ms = [rng.read(32) for _ in range(z)]
    cumulative = []
    acc = 0
    for d in deltas:
        acc += d
        cumulative.append(acc)
    with _pinned_cpu():
        pairs, t_setup = _timed(
            lambda: [tlp_setup(bits, d, s_local, rng, primes=primes) for d in cumulative]
        )
        puzzles, t_gen = _timed(
            lambda: [tlp_gen(m, pk, sk, rng) for m, (pk, sk) in zip(ms, pairs)]
        )
        solve_counter = OpCounter()

        def solve_all():
            outs = []
            for (pk, _), p in zip(pairs, puzzles):
                outs.append(tlp_solve(pk, p, solve_counter))
            return outs

        outs, t_solve = _timed(solve_all)
    if [m for m, _ in outs] != ms:
        raise RuntimeError("self-check failed: solved messages differ")
    return TimingReport(
        scheme="tlp",
        z=z,
        phases=(
            PhaseTiming("setup", t_setup, 0),
            PhaseTiming("genpuzzle", t_gen, 0),
            PhaseTiming("solve", t_solve, solve_counter.squarings),
        ),
    )


def _time_edtlp(z, deltas, s_local, rng, bits, primes) -> TimingReport:
    ms = [rng.read(32) for _ in range(z)]
    clock = ManualClock(0)
    coins = [1] * z
    ledger = CoinLedger({"server": z})
    aux = HelperProfile(s_id=s_local)
    upsilon = NetworkDelayParams(0, 0).upsilon
    with _pinned_cpu():
        keys, t_setup = _timed(lambda: edtlp.client_setup(deltas, rng.derive(b"client")))
        enc, t_delegate_c = _timed(
            lambda: edtlp.client_delegate(ms, keys, rng.derive(b"enc"), clock, upsilon)
        )
        (sc, sched), t_delegate_s = _timed(
            lambda: edtlp.server_delegate(
                "derived", s_local, deltas, aux, "helper", enc.t0, upsilon,
                coins, ledger, clock, "server",
            )
        )
        hc_counter = OpCounter()
        (pk, chain), t_gen = _timed(
            lambda: edtlp.helper_c_run(
                enc, bits, deltas, s_local, rng.derive(b"hc"), sc, hc_counter, primes=primes
            )
        )
        hs_counter = OpCounter()
        q, t_solve = _timed(
            lambda: edtlp.helper_s_run(
                sched.psis, aux, s_local, pk, chain, sc, coins, clock, hs_counter
            )
        )
        _, t_verify = _timed(lambda: [sc.verify(j) for j in range(1, z + 1)])
        outs, t_retrieve = _timed(
            lambda: [edtlp.retrieve(keys.csk, sc, j) for j in range(1, z + 1)]
        )
    if q != 1 or outs != ms:
        raise RuntimeError("self-check failed: delegation run did not deliver")
    return TimingReport(
        scheme="edtlp",
        z=z,
        phases=(
            PhaseTiming("setup", t_setup, 0),
            PhaseTiming("delegate", t_delegate_c + t_delegate_s, 0),
            PhaseTiming("genpuzzle", t_gen, 0),
            PhaseTiming("solve", t_solve, hs_counter.squarings),
            PhaseTiming("verify", t_verify, 0),
            PhaseTiming("retrieve", t_retrieve, 0),
        ),
    )


def write_csv(reports: "list[TimingReport]", path: str) -> None:
    """One row per phase, Table-shaped."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for report in reports:
            for p in report.phases:
                writer.writerow([report.scheme, report.z, p.name, f"{p.seconds:.6f}", p.squarings])
