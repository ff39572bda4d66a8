import pytest
from hypothesis import given, strategies as st

from timelock.group_arith import OpCounter, RsaTrapdoor, group_from_primes
from timelock.primitives import DecryptionError, ske_enc
from timelock.rng import Rng
from timelock.tlp_base import (
    KeyEmbeddingError,
    TlpPublic,
    TlpSecret,
    puzzle_from_manifest,
    puzzle_to_manifest,
    sample_masking_key,
    tlp_gen,
    tlp_setup,
    tlp_solve,
)

from .conftest import TOY_PRIMES
from .oracles import pow_brute


def toy_keys(r=2, t=3, k=5):
    """Hand-checkable instance over N = 11*23 with explicit key material."""
    group, trapdoor = group_from_primes(*TOY_PRIMES)
    a = pow_brute(2, t, trapdoor.phi)
    pk = TlpPublic(group=group, t=t, r=r)
    sk = TlpSecret(trapdoor=trapdoor, a=a, k=k.to_bytes(32, "big"))
    return pk, sk


def test_worked_example_values():
    pk, sk = toy_keys()
    assert pk.group.n == 253
    assert sk.trapdoor.phi == 220
    assert sk.a == 8
    rng = Rng(b"toy")
    p = tlp_gen(b"hello", pk, sk, rng)
    # r^a = 2^8 mod 253 = 3, so p2 = (5 + 3) mod 253 = 8
    assert p.p2 == 8
    m, count = tlp_solve(pk, p)
    assert m == b"hello"
    assert count == 3


def test_mask_recovery_identity():
    pk, sk = toy_keys(r=7, t=10, k=100)
    p = tlp_gen(b"m", pk, sk, Rng(b"mask"))
    mask = pow_brute(7, sk.a, 253)
    assert (p.p2 - mask) % 253 == 100


def test_setup_derives_t_from_rate_and_delay():
    rng = Rng(b"setup")
    pk, sk = tlp_setup(0, delta=7, s_rate=10, rng=rng, primes=TOY_PRIMES)
    assert pk.t == 70
    assert sk.a == pow(2, 70, 220)
    assert sk.trapdoor == RsaTrapdoor(q1=11, q2=23, phi=220)


def test_setup_rejects_bad_parameters():
    rng = Rng(b"bad")
    with pytest.raises(ValueError):
        tlp_setup(0, delta=1, s_rate=0, rng=rng, primes=TOY_PRIMES)
    with pytest.raises(ValueError):
        tlp_setup(0, delta=-1, s_rate=1, rng=rng, primes=TOY_PRIMES)


def test_round_trip_on_generated_modulus(primes512):
    rng = Rng(b"rt512")
    pk, sk = tlp_setup(512, delta=20, s_rate=5, rng=rng, primes=primes512)
    p = tlp_gen(b"the quick brown fox", pk, sk, rng)
    m, count = tlp_solve(pk, p)
    assert m == b"the quick brown fox"
    assert count == pk.t == 100


def test_masking_key_is_32_bytes_and_below_modulus(primes512):
    group, _ = group_from_primes(*primes512)
    toy_group, _ = group_from_primes(*TOY_PRIMES)
    rng = Rng(b"mk")
    for g in (group, toy_group):
        for _ in range(50):
            k = sample_masking_key(g, rng)
            assert len(k) == 32
            assert int.from_bytes(k, "big") < g.n


def test_gen_rejects_oversized_key():
    pk, sk = toy_keys(k=253)
    with pytest.raises(KeyEmbeddingError):
        tlp_gen(b"m", pk, sk, Rng(b"big"))
    pk, sk = toy_keys(k=252)
    assert tlp_gen(b"m", pk, sk, Rng(b"fits"))


def test_generation_is_cheap_solving_is_sequential():
    t = 10**6
    pk, sk = toy_keys(t=t)
    gen_counter = OpCounter()
    p = tlp_gen(b"m", pk, sk, Rng(b"cost"), gen_counter)
    assert gen_counter.squarings == 0
    assert gen_counter.mulmods < t // 100
    solve_counter = OpCounter()
    m, count = tlp_solve(pk, p, solve_counter)
    assert m == b"m"
    assert count == t
    assert solve_counter.squarings == t
    assert solve_counter.expmods == 0


def test_tampered_p1_fails_to_decrypt():
    pk, sk = toy_keys()
    rng = Rng(b"tamper")
    p = tlp_gen(b"hello", pk, sk, rng)
    bad_p1 = ske_enc(b"\x00" * 32, b"other", rng)
    from timelock.tlp_base import TlpPuzzle

    with pytest.raises(DecryptionError):
        tlp_solve(pk, TlpPuzzle(p1=bad_p1, p2=p.p2))


def test_shifted_p2_fails_to_decrypt():
    pk, sk = toy_keys()
    from timelock.tlp_base import TlpPuzzle

    p = tlp_gen(b"hello", pk, sk, Rng(b"shift"))
    with pytest.raises(DecryptionError):
        tlp_solve(pk, TlpPuzzle(p1=p.p1, p2=(p.p2 + 1) % 253))


def test_public_parameter_validation():
    group, _ = group_from_primes(*TOY_PRIMES)
    with pytest.raises(ValueError):
        TlpPublic(group=group, t=-1, r=2)
    with pytest.raises(ValueError):
        TlpPublic(group=group, t=3, r=253)


def test_manifest_round_trip():
    pk, sk = toy_keys()
    p = tlp_gen(b"hello", pk, sk, Rng(b"mf"))
    text = puzzle_to_manifest(pk, p)
    pk2, p2 = puzzle_from_manifest(text)
    assert (pk2.group.n, pk2.t, pk2.r) == (253, 3, 2)
    assert p2 == p
    assert puzzle_to_manifest(pk2, p2) == text
    m, _ = tlp_solve(pk2, p2)
    assert m == b"hello"


@given(st.binary(max_size=64), st.integers(min_value=0, max_value=40))
def test_round_trip_property(m, t):
    pk, sk = toy_keys(t=t, k=17)
    p = tlp_gen(m, pk, sk, Rng(b"prop" + m))
    out, count = tlp_solve(pk, p)
    assert out == m and count == t
