"""Extra-delay estimation for delegated solving, and deadline schedules.

Two estimators ship.  cedg_paper evaluates the published formula
psi = delta*(1 + s_id/S) + offset verbatim; it shrinks as the helper gets
slower, which callers should know before choosing it.  cedg_derived uses
the physical reading psi = delta*max(0, S/s_id - 1) + offset: the extra
seconds a helper running at s_id needs beyond the interval itself.

All arithmetic is exact (Fraction); deadlines round up at schedule
boundaries so they are never accidentally early.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

MODULAR_SQUARING = "modular-squaring"


class UnsupportedComputationError(ValueError):
    """Delay estimator asked about a computation type it does not model."""


@dataclass(frozen=True)
class HelperProfile:
    """Helper capability: computation type, squarings/second, seconds until free."""

    toc: str = MODULAR_SQUARING
    s_id: int = 1
    avail_offset: int = 0

    def __post_init__(self):
        if self.s_id < 1:
            raise ValueError("helper rate must be >= 1")
        if self.avail_offset < 0:
            raise ValueError("availability offset must be non-negative")


@dataclass(frozen=True)
class NetworkDelayParams:
    """Blockchain visibility lag bound: window size plus confirmation wait."""

    window_size: int
    wait_u: int

    def __post_init__(self):
        if self.window_size < 0 or self.wait_u < 0:
            raise ValueError("delay components must be non-negative")

    @property
    def upsilon(self) -> int:
        return self.window_size + self.wait_u


@dataclass(frozen=True)
class DeadlineSchedule:
    """Per-link registration deadlines T_j^d = t0 + sum(delta_i + psi_i + upsilon)."""

    t0: int
    psis: tuple[Fraction, ...]
    upsilon: int
    deadlines: tuple[int, ...]


def cedg_paper(toc: str, s_rate: int, delta: "int | Fraction", aux: HelperProfile) -> Fraction:
    """Published extra-delay formula: delta*(1 + s_id/S) + offset, literally."""
    if toc != MODULAR_SQUARING or aux.toc != MODULAR_SQUARING:
        raise UnsupportedComputationError(f"cannot estimate delay for {toc!r}")
    if s_rate < 1:
        raise ValueError("squaring rate must be >= 1")
    return Fraction(delta) * (1 + Fraction(aux.s_id, s_rate)) + aux.avail_offset


def cedg_derived(s_rate: int, delta: "int | Fraction", aux: HelperProfile) -> Fraction:
    """Extra seconds a helper at s_id needs beyond delta; offset-only when s_id >= S."""
    if s_rate < 1:
        raise ValueError("squaring rate must be >= 1")
    slowdown = max(Fraction(0), Fraction(s_rate, aux.s_id) - 1)
    return Fraction(delta) * slowdown + aux.avail_offset


def schedule(
    t0: int,
    deltas: "list[int]",
    psis: "list[int | Fraction]",
    upsilon: int,
) -> DeadlineSchedule:
    """Cumulative deadlines; fractional sums round up to whole seconds."""
    if len(deltas) != len(psis):
        raise ValueError("interval and extra-delay vectors must match")
    if upsilon < 0:
        raise ValueError("network delay must be non-negative")
    acc = Fraction(0)
    deadlines = []
    for delta, psi in zip(deltas, psis):
        acc += Fraction(delta) + Fraction(psi) + upsilon
        deadlines.append(t0 + math.ceil(acc))
    return DeadlineSchedule(
        t0=t0,
        psis=tuple(Fraction(p) for p in psis),
        upsilon=upsilon,
        deadlines=tuple(deadlines),
    )
