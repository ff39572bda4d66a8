from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from timelock.cedg import (
    MODULAR_SQUARING,
    HelperProfile,
    NetworkDelayParams,
    UnsupportedComputationError,
    cedg_derived,
    cedg_paper,
    schedule,
)

from .oracles import schedule_oracle


def profile(s_id=10**6, offset=0):
    return HelperProfile(s_id=s_id, avail_offset=offset)


def test_paper_formula_equal_speed_helper():
    psi = cedg_paper(MODULAR_SQUARING, 10**6, 100, profile(s_id=10**6))
    assert psi == 200


def test_paper_formula_zero_interval_and_offset():
    assert cedg_paper(MODULAR_SQUARING, 10**6, 0, profile(offset=7)) == 7
    base = cedg_paper(MODULAR_SQUARING, 10**6, 100, profile())
    with_offset = cedg_paper(MODULAR_SQUARING, 10**6, 100, profile(offset=50))
    assert with_offset - base == 50


def test_paper_formula_is_exact_rational():
    psi = cedg_paper(MODULAR_SQUARING, 3, 1, HelperProfile(s_id=1))
    assert psi == Fraction(4, 3)


def test_paper_formula_rejects_unknown_computation():
    with pytest.raises(UnsupportedComputationError):
        cedg_paper("sorting", 10**6, 100, profile())
    with pytest.raises(UnsupportedComputationError):
        cedg_paper(MODULAR_SQUARING, 10**6, 100, HelperProfile(toc="sorting"))


def test_derived_formula_half_speed_helper():
    assert cedg_derived(2 * 10**6, 100, profile(s_id=10**6)) == 100


def test_derived_formula_fast_helpers_need_only_offset():
    assert cedg_derived(10**6, 100, profile(s_id=10**6, offset=3)) == 3
    assert cedg_derived(10**6, 100, profile(s_id=5 * 10**6, offset=3)) == 3


def test_derived_formula_monotone_in_helper_speed():
    prev = None
    for s_id in (10**7, 10**6, 10**5, 10**4, 1):
        psi = cedg_derived(10**6, 50, profile(s_id=s_id))
        if prev is not None:
            assert psi >= prev
        prev = psi


def test_helper_profile_validation():
    with pytest.raises(ValueError):
        HelperProfile(s_id=0)
    with pytest.raises(ValueError):
        HelperProfile(avail_offset=-1)


def test_upsilon_is_window_plus_wait():
    assert NetworkDelayParams(window_size=9, wait_u=3).upsilon == 12
    with pytest.raises(ValueError):
        NetworkDelayParams(window_size=-1, wait_u=0)


def test_schedule_worked_example():
    sched = schedule(1000, [10, 20], [2, 4], 3)
    assert sched.deadlines == (1015, 1042)
    assert sched.t0 == 1000
    assert sched.psis == (Fraction(2), Fraction(4))
    assert sched.upsilon == 3


def test_schedule_degenerate_and_fractional():
    assert schedule(500, [0], [0], 0).deadlines == (500,)
    # fractional extras round up at every boundary
    assert schedule(0, [1, 1], [Fraction(1, 2), Fraction(1, 2)], 0).deadlines == (2, 3)


def test_schedule_rejects_bad_inputs():
    with pytest.raises(ValueError):
        schedule(0, [1, 2], [1], 0)
    with pytest.raises(ValueError):
        schedule(0, [1], [1], -1)


def test_schedule_matches_oracle():
    for t0, deltas, psis, ups in (
        (1000, [10, 20], [2, 4], 3),
        (0, [5, 5, 5], [0, 0, 0], 1),
        (99, [86400, 57600], [10, 20], 12),
    ):
        assert list(schedule(t0, deltas, psis, ups).deadlines) == schedule_oracle(
            t0, deltas, psis, ups
        )


@given(
    st.integers(min_value=0, max_value=10**6),
    st.lists(st.integers(min_value=0, max_value=10**4), min_size=1, max_size=8),
    st.integers(min_value=0, max_value=100),
)
def test_schedule_telescopes_on_integer_inputs(t0, deltas, upsilon):
    psis = [d // 2 for d in deltas]
    sched = schedule(t0, deltas, psis, upsilon)
    prev = t0
    for delta, psi, deadline in zip(deltas, psis, sched.deadlines):
        assert deadline - prev == delta + psi + upsilon
        prev = deadline


@given(
    st.lists(st.integers(min_value=1, max_value=1000), min_size=2, max_size=6),
    st.integers(min_value=0, max_value=10),
)
def test_schedule_strictly_increasing_for_positive_steps(deltas, upsilon):
    sched = schedule(0, deltas, [0] * len(deltas), upsilon)
    assert all(b > a for a, b in zip(sched.deadlines, sched.deadlines[1:]))
