import pytest
from hypothesis import settings

from timelock.bench import calibrate
from timelock.group_arith import gen_modulus
from timelock.rng import Rng

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")

TOY_PRIMES = (11, 23)
MID_PRIMES = (1009, 2003)


@pytest.fixture(scope="session")
def primes512():
    _, trap = gen_modulus(512, seed=b"fixture-512")
    return trap.q1, trap.q2


@pytest.fixture(scope="session")
def primes1024():
    _, trap = gen_modulus(1024, seed=b"fixture-1024")
    return trap.q1, trap.q2


@pytest.fixture(scope="session")
def primes2048():
    _, trap = gen_modulus(2048, seed=b"fixture-2048")
    return trap.q1, trap.q2


@pytest.fixture(scope="session")
def rate2048(primes2048):
    """Local 2048-bit squaring rate; max of two windows for stability."""
    runs = [calibrate(2048, 1.0, Rng(b"cal-2048"), primes=primes2048) for _ in range(2)]
    return max(runs, key=lambda r: r.rate)


@pytest.fixture(scope="session")
def rate1024(primes1024):
    return calibrate(1024, 1.0, Rng(b"cal-1024"), primes=primes1024)
