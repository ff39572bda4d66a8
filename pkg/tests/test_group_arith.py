import math
import random

import pytest
from hypothesis import given, strategies as st

from timelock.group_arith import (
    OpCounter,
    RsaGroup,
    gen_modulus,
    group_from_primes,
    is_probable_prime,
    pow_mod,
    repeated_square,
    sample_unit,
)
from timelock.rng import Rng

from .oracles import miller_rabin_ref, pow_brute, square_chain

TOY = group_from_primes(11, 23)


def test_gen_modulus_deterministic_under_seed():
    a = gen_modulus(16, seed=b"fixed")
    b = gen_modulus(16, seed=b"fixed")
    assert a == b
    group, trap = a
    assert trap.q1 * trap.q2 == group.n


def test_gen_modulus_different_seeds_differ():
    assert gen_modulus(32, seed=b"one") != gen_modulus(32, seed=b"two")


def test_forced_primes_toy():
    group, trap = TOY
    assert group.n == 11 * 23 == 253
    assert trap.phi == 10 * 22 == 220


def test_group_from_primes_rejects_composite():
    with pytest.raises(ValueError):
        group_from_primes(15, 23)
    with pytest.raises(ValueError):
        group_from_primes(11, 11)


def test_gen_modulus_bit_length():
    for bits in (16, 24, 64, 128):
        group, _ = gen_modulus(bits, seed=b"len" + bytes([bits]))
        assert abs(group.n.bit_length() - bits) <= 1
        assert group.n % 2 == 1


def test_gen_modulus_rejects_tiny():
    with pytest.raises(ValueError):
        gen_modulus(8, seed=b"x")


def test_gen_modulus_2048_safe_primes_pass_independent_miller_rabin():
    group, trap = gen_modulus(2048, seed=b"safe-2048", safe=True)
    rnd = random.Random(0xC0FFEE)
    for q in (trap.q1, trap.q2):
        assert miller_rabin_ref(q, 64, rnd)
        assert miller_rabin_ref((q - 1) // 2, 64, rnd)
    assert trap.q1 * trap.q2 == group.n


def test_is_probable_prime_agrees_with_reference():
    rnd = random.Random(7)
    rng = Rng(b"mr")
    for n in list(range(2, 200)) + [2003, 65537, 65539, 10**9 + 7]:
        assert is_probable_prime(n, 64, rng) == miller_rabin_ref(n, 64, rnd), n


def test_pow_mod_brute_force_oracle():
    assert pow_mod(2, 8, TOY[0]) == 3
    assert pow_brute(2, 8, 253) == 3
    rng = Rng(b"pow")
    for _ in range(50):
        base = rng.randint_below(253)
        exp = rng.randint_below(2000)
        assert pow_mod(base, exp, TOY[0]) == pow_brute(base, exp, 253)


def test_pow_mod_exponent_zero_and_one():
    group = TOY[0]
    for x in (0, 1, 2, 77, 252):
        assert pow_mod(x, 0, group) == 1
        assert pow_mod(x, 1, group) == x


def test_pow_mod_rejects_out_of_range():
    with pytest.raises(ValueError):
        pow_mod(253, 2, TOY[0])
    with pytest.raises(ValueError):
        pow_mod(2, -1, TOY[0])


@given(st.integers(min_value=0, max_value=252), st.integers(min_value=0, max_value=10**6))
def test_pow_mod_matches_builtin(base, exp):
    assert pow_mod(base, exp, TOY[0]) == pow(base, exp, 253)


def test_pow_mod_counts_multiplications():
    counter = OpCounter()
    pow_mod(2, 0b1011, TOY[0], counter)
    # 3 squarings for the bits after the leading one, 2 multiplies for the set bits
    assert counter.expmods == 1
    assert counter.mulmods == 5
    assert counter.squarings == 0


def test_repeated_square_hand_unrolled():
    # 2 -> 4 -> 16 -> 256 mod 253 = 3
    report = repeated_square(2, 3, TOY[0])
    assert report.result == 3
    assert report.count == 3
    assert square_chain(2, 3, 253) == 3


def test_repeated_square_zero_iterations():
    report = repeated_square(77, 0, TOY[0])
    assert (report.result, report.count) == (77, 0)


def test_repeated_square_crosses_chunk_boundary():
    group = TOY[0]
    for t in (8191, 8192, 8193, 20000):
        counter = OpCounter()
        report = repeated_square(5, t, group, counter)
        assert report.count == t
        assert counter.squarings == t
        # gcd(5, 253) = 1, so the exponent reduces mod phi
        assert report.result == pow(5, pow(2, t, 220), 253)


def test_repeated_square_matches_oracle():
    rng = Rng(b"sq")
    for _ in range(30):
        r = rng.randint_below(253)
        t = rng.randint_below(50)
        assert repeated_square(r, t, TOY[0]).result == square_chain(r, t, 253)


def test_trapdoor_equivalence_on_toy_group():
    group, trap = TOY
    rng = Rng(b"trap")
    for _ in range(100):
        r = sample_unit(group, rng)
        t = rng.randint_below(65)
        a = pow_brute(2, t, trap.phi)
        assert pow_mod(r, a, group) == repeated_square(r, t, group).result


def test_sample_unit_postcondition_and_determinism():
    group = TOY[0]
    assert math.gcd(sample_unit(group, Rng(b"s")), 253) == 1
    assert sample_unit(group, Rng(b"s")) == sample_unit(group, Rng(b"s"))


def test_sample_unit_coprime_to_both_factors():
    group = TOY[0]
    rng = Rng(b"units")
    for _ in range(1000):
        r = sample_unit(group, rng)
        assert r % 11 != 0 and r % 23 != 0


def test_rsa_group_validation():
    with pytest.raises(ValueError):
        RsaGroup(n=14, bits=4)
    with pytest.raises(ValueError):
        RsaGroup(n=253, bits=12)


def test_rng_stream_is_deterministic_and_splittable():
    a, b = Rng(b"seed"), Rng(b"seed")
    assert a.read(64) == b.read(64)
    assert Rng(b"seed").derive(b"x").read(16) == Rng(b"seed").derive(b"x").read(16)
    assert Rng(b"seed").derive(b"x").read(16) != Rng(b"seed").derive(b"y").read(16)


@given(st.integers(min_value=1, max_value=2**64))
def test_rng_randint_below_in_range(bound):
    assert 0 <= Rng(b"bound").randint_below(bound) < bound
