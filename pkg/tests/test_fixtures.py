"""Shipped manifest fixtures stay loadable and byte-stable."""

import glob
import os

from timelock import edtlp, gctlp
from timelock.contract import CoinLedger, EscrowContract, ManualClock
from timelock.manifest import emit, parse

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


def load(name):
    with open(os.path.join(FIXTURE_DIR, name)) as f:
        return f.read()


def test_every_fixture_round_trips_byte_for_byte():
    paths = sorted(glob.glob(os.path.join(FIXTURE_DIR, "*.mf")))
    assert len(paths) == 6
    for path in paths:
        with open(path) as f:
            text = f.read()
        assert emit(list(parse(text).items())) == text, path


def test_chain_fixture_solves_and_verifies():
    pk = gctlp.chain_public_from_manifest(load("chain-pk.mf"))
    sk = gctlp.chain_secret_from_manifest(load("chain-sk.mf"))
    pk2, chain = gctlp.chain_from_manifest(load("chain.mf"))
    gs = gctlp.commitments_from_manifest(load("commitments.mf"))
    assert pk2.group.n == pk.group.n == 1009 * 2003
    assert pk.ts == (10, 20, 40)
    assert sk.trapdoor.q1 * sk.trapdoor.q2 == pk.group.n
    assert gs == chain.commitments
    sols, total = gctlp.chain_solve(pk, chain)
    assert [s.m for s in sols] == [b"first", b"second", b"third"]
    assert total == 70
    for s in sols:
        assert gctlp.chain_verify(pk, s.index, s.m, s.d, gs[s.index - 1])


def test_scenario_fixture_runs_the_refund_path():
    cfg = edtlp.demo_config_from_manifest(load("scenario.mf"))
    assert cfg.messages == [b"hello", b"world"]
    assert cfg.late_extra == {2: 50}
    report = edtlp.run_demo(cfg)
    assert [link.v for link in report.links] == [True, False]
    assert report.retrieved == [b"hello", b"world"]
    assert report.balances["server"] == cfg.coins[1]


def test_contract_fixture_restores_and_settles():
    ledger = CoinLedger({"escrow-fx": 3, "server": 0, "helper": 2})
    clock = ManualClock(130)
    sc = EscrowContract.restore(load("contract.mf"), ledger, clock)
    assert sc.dump() == load("contract.mf")
    assert sc.v == [True, None]
    assert sc.u == [True, None]
    assert sc.claim_expired(2) is False
    assert sc.pay(2) is False
    assert ledger.balance("server") == 3
    assert ledger.balance("escrow-fx") == 0
