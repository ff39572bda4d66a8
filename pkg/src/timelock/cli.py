"""Command-line front end.

Exit codes: 0 success or verified, 1 verification failed, 2 usage error,
3 runtime error.  Every command is deterministic under --seed except
wall-clock timing fields.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bench, edtlp, gctlp, manifest
from .gctlp import ChainSolveError
from .rng import Rng, system_rng

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3

SEED_ENV = "TIMELOCK_SEED"
TEST_MODE_ENV = "TIMELOCK_TEST_MODE"


def _rng_from(seed_hex: "str | None") -> Rng:
    if seed_hex:
        return Rng(bytes.fromhex(seed_hex))
    if os.environ.get(TEST_MODE_ENV) == "1" and os.environ.get(SEED_ENV):
        return Rng(bytes.fromhex(os.environ[SEED_ENV]))
    return system_rng()


def _parse_intervals(text: str, parser: argparse.ArgumentParser) -> list[int]:
    if text.strip() == "":
        return []
    try:
        values = [int(part) for part in text.split(",")]
    except ValueError:
        parser.error("intervals must be comma-separated integers")
    if any(v < 0 for v in values):
        parser.error("intervals must be non-negative")
    return values


def _write_text(path: str, text: str) -> None:
    with open(path, "w") as f:
        f.write(text)


def _write_secret(path: str, text: str) -> None:
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
    with os.fdopen(fd, "w") as f:
        f.write(text)


def _cmd_keygen(args, parser) -> int:
    intervals = _parse_intervals(args.intervals, parser)
    if not intervals:
        parser.error("intervals must not be empty")
    rng = _rng_from(args.seed)
    pk, sk = gctlp.chain_setup(args.bits, intervals, args.rate, rng, safe=args.safe)
    pk_path, sk_path = args.out
    _write_text(pk_path, gctlp.chain_public_to_manifest(pk))
    sk_text = gctlp.chain_secret_to_manifest(sk)
    _write_secret(sk_path, sk_text)
    if args.insecure_stdout:
        sys.stdout.write(sk_text)
    print(f"wrote {pk_path} and {sk_path} (z={pk.z})", file=sys.stderr)
    return EXIT_OK


def _cmd_lock(args, parser) -> int:
    with open(args.pk) as f:
        pk = gctlp.chain_public_from_manifest(f.read())
    with open(args.sk) as f:
        sk = gctlp.chain_secret_from_manifest(f.read())
    ms = []
    for path in args.messages:
        with open(path, "rb") as f:
            ms.append(f.read())
    if len(ms) != pk.z:
        raise ValueError(f"chain has {pk.z} links but {len(ms)} messages given")
    rng = _rng_from(args.seed)
    chain = gctlp.chain_gen(ms, pk, sk, rng)
    _write_text(args.out, gctlp.chain_to_manifest(pk, chain))
    if args.commitments:
        _write_text(args.commitments, gctlp.commitments_to_manifest(chain.commitments))
    print(f"locked {len(ms)} messages into {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_solve(args, parser) -> int:
    with open(args.pk) as f:
        pk = gctlp.chain_public_from_manifest(f.read())
    with open(args.chain) as f:
        chain_pk, chain = gctlp.chain_from_manifest(f.read())
    if chain_pk.group.n != pk.group.n or chain_pk.ts != pk.ts:
        raise ValueError("chain manifest does not match the public key")
    os.makedirs(args.emit_dir, exist_ok=True)

    def emit(sol):
        msg_path = os.path.join(args.emit_dir, f"sol.{sol.index}.msg")
        wit_path = os.path.join(args.emit_dir, f"sol.{sol.index}.wit")
        with open(msg_path, "wb") as f:
            f.write(sol.m)
        _write_text(wit_path, manifest.bytes_to_hex(sol.d) + "\n")
        print(f"link {sol.index} opened -> {msg_path}", file=sys.stderr)

    _, total = gctlp.chain_solve(pk, chain, emit=emit)
    print(f"squarings = {total}")
    return EXIT_OK


def _cmd_verify(args, parser) -> int:
    with open(args.pk) as f:
        pk = gctlp.chain_public_from_manifest(f.read())
    with open(args.message, "rb") as f:
        m = f.read()
    ok = gctlp.chain_verify(
        pk,
        args.j,
        m,
        manifest.hex_to_bytes(args.witness),
        manifest.hex_to_bytes(args.commitment),
    )
    print("verified" if ok else "rejected")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _cmd_extend(args, parser) -> int:
    intervals = _parse_intervals(args.intervals, parser)
    with open(args.pk) as f:
        pk = gctlp.chain_public_from_manifest(f.read())
    with open(args.sk) as f:
        sk = gctlp.chain_secret_from_manifest(f.read())
    ms = []
    for path in args.messages or []:
        with open(path, "rb") as f:
            ms.append(f.read())
    if len(ms) != len(intervals):
        raise ValueError(f"{len(intervals)} new intervals but {len(ms)} messages given")
    rng = _rng_from(args.seed)
    pk2, sk2 = gctlp.chain_extend_setup(intervals, args.rate, pk, sk, rng)
    pk_path, sk_path, links_path = args.out
    new_links = gctlp.chain_extend_gen(ms, pk2, sk2, rng) if intervals else None
    _write_text(pk_path, gctlp.chain_public_to_manifest(pk2))
    _write_secret(sk_path, gctlp.chain_secret_to_manifest(sk2))
    pairs = [
        ("start", manifest.int_to_hex(pk.z + 1)),
        ("z", manifest.int_to_hex(len(intervals))),
    ]
    if new_links is not None:
        manifest.put_vector(
            pairs, "p1", [manifest.bytes_to_hex(p.p1.to_bytes()) for p in new_links.puzzles]
        )
        manifest.put_vector(pairs, "p2", [manifest.int_to_hex(p.p2) for p in new_links.puzzles])
        manifest.put_vector(pairs, "g", [manifest.bytes_to_hex(g) for g in new_links.commitments])
    _write_text(links_path, manifest.emit(pairs))
    if args.chain and args.out_chain:
        with open(args.chain) as f:
            _, old_chain = gctlp.chain_from_manifest(f.read())
        merged = gctlp.chain_append(old_chain, new_links) if new_links else old_chain
        _write_text(args.out_chain, gctlp.chain_to_manifest(pk2, merged))
    print(f"extended chain by {len(intervals)} links", file=sys.stderr)
    return EXIT_OK


def _cmd_bench(args, parser) -> int:
    rng = _rng_from(args.seed)
    measured = None
    if args.cache:
        measured = bench.rate_cache_load(args.cache, args.bits)
    if measured is None:
        measured = bench.calibrate(args.bits, args.seconds, rng)
        if args.cache:
            bench.rate_cache_store(args.cache, measured)
    print(f"bits = {args.bits}")
    print(f"rate = {measured.rate:.0f} squarings/s over {measured.duration:.2f}s")
    if args.csv:
        deltas = [1] * args.timing_z
        report = bench.run_timing("gctlp", args.timing_z, deltas, args.timing_rate, rng, bits=args.bits)
        bench.write_csv([report], args.csv)
        print(f"wrote {args.csv}")
    return EXIT_OK


def _cmd_demo(args, parser) -> int:
    with open(args.config) as f:
        cfg = edtlp.demo_config_from_manifest(f.read())
    if args.combine:
        if len(cfg.deltas) < 2:
            raise ValueError("combine scenario needs two release times")
        d1, d2 = cfg.deltas[0], cfg.deltas[0] + cfg.deltas[1]
        rng = Rng(cfg.seed)
        ms = cfg.messages or [rng.derive(b"combine").read(32) for _ in range(2)]
        result = edtlp.run_combine_demo(
            (d1, d2), cfg.s_rate, ms[0], ms[1], rng, bits=cfg.bits, primes=cfg.primes
        )
        out = {
            "messages_ok": result["messages_ok"],
            "commitments_ok": result["commitments_ok"],
            "release_offsets": [str(x) for x in result["release_offsets"]],
            "per_link_counts": result["per_link_counts"],
            "total_squarings": result["total_squarings"],
        }
        text = json.dumps(out, indent=2, sort_keys=True)
    else:
        report = edtlp.run_demo(cfg)
        text = report.to_json()
    if args.out:
        _write_text(args.out, text + "\n")
    print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timelock", description="Chained time-lock puzzles with delegated solving."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate chain keys")
    p.add_argument("--bits", type=int, default=2048)
    p.add_argument("--intervals", required=True, help="comma-separated seconds per link")
    p.add_argument("--rate", type=int, required=True, help="assumed squarings per second")
    p.add_argument("--seed", help="hex seed for deterministic output")
    p.add_argument("--safe", action="store_true", help="use safe primes")
    p.add_argument("--insecure-stdout", action="store_true", help="also print the secret key")
    p.add_argument("--out", nargs=2, required=True, metavar=("PK", "SK"))
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("lock", help="lock messages into a chain")
    p.add_argument("--pk", required=True)
    p.add_argument("--sk", required=True)
    p.add_argument("--messages", nargs="+", required=True)
    p.add_argument("--seed")
    p.add_argument("--commitments", help="also write a standalone commitment manifest")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_lock)

    p = sub.add_parser("solve", help="solve a chain, emitting solutions as they open")
    p.add_argument("--pk", required=True)
    p.add_argument("--chain", required=True)
    p.add_argument("--emit-dir", required=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="check a solution against a commitment")
    p.add_argument("--pk", required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--message", required=True)
    p.add_argument("--witness", required=True, help="hex witness")
    p.add_argument("--commitment", required=True, help="hex commitment")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("extend", help="append links to an existing chain")
    p.add_argument("--pk", required=True)
    p.add_argument("--sk", required=True)
    p.add_argument("--intervals", required=True)
    p.add_argument("--rate", type=int, required=True)
    p.add_argument("--messages", nargs="*", default=[])
    p.add_argument("--seed")
    p.add_argument("--chain", help="existing chain manifest to merge with")
    p.add_argument("--out-chain", help="where to write the merged chain")
    p.add_argument("--out", nargs=3, required=True, metavar=("PK", "SK", "LINKS"))
    p.set_defaults(func=_cmd_extend)

    p = sub.add_parser("bench", help="calibrate the local squaring rate")
    p.add_argument("--bits", type=int, default=2048)
    p.add_argument("--seconds", type=float, default=2.0)
    p.add_argument("--seed")
    p.add_argument("--cache", help="rate cache file")
    p.add_argument("--csv", help="also run a timing pass and write per-phase CSV")
    p.add_argument("--timing-z", type=int, default=3)
    p.add_argument("--timing-rate", type=int, default=2000)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("demo", help="run a scripted delegation scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--combine", action="store_true", help="two-client merge scenario")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=_cmd_demo)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except ChainSolveError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
