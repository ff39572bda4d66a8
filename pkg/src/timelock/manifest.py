"""Line-oriented `key = value` manifest format.

Big integers are lowercase big-endian hex with no leading zeros ("0" for
zero); byte-strings are plain hex preserving length; vectors use indexed
keys (t.1, t.2, ...).  parse/emit round-trip losslessly.
"""

from __future__ import annotations


class ManifestError(ValueError):
    """Malformed manifest text or missing/duplicate keys."""


def int_to_hex(x: int) -> str:
    if x < 0:
        raise ValueError("negative integers have no manifest encoding")
    return format(x, "x")


_HEX_DIGITS = frozenset("0123456789abcdef")


def hex_to_int(s: str) -> int:
    if (
        s == ""
        or not set(s) <= _HEX_DIGITS
        or (s != "0" and s.startswith("0"))
    ):
        raise ManifestError(f"bad integer field: {s!r}")
    return int(s, 16)


def bytes_to_hex(b: bytes) -> str:
    return b.hex()


def hex_to_bytes(s: str) -> bytes:
    if len(s) % 2 or not set(s) <= _HEX_DIGITS:
        raise ManifestError(f"bad byte-string field: {s!r}")
    return bytes.fromhex(s)


def emit(pairs: "list[tuple[str, str]] | dict[str, str]") -> str:
    """Serialize key/value pairs, one `key = value` line each."""
    if isinstance(pairs, dict):
        pairs = list(pairs.items())
    lines = []
    for key, value in pairs:
        if not key or any(c.isspace() for c in key) or "=" in key:
            raise ManifestError(f"bad key: {key!r}")
        if "\n" in value:
            raise ManifestError(f"bad value for {key!r}")
        lines.append(f"{key} = {value}" if value else f"{key} =")
    return "".join(line + "\n" for line in lines)


def parse(text: str) -> dict[str, str]:
    """Parse manifest text into an ordered key -> value map."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.endswith(" ="):
            key, value = line[:-2], ""
        else:
            key, sep, value = line.partition(" = ")
            if not sep:
                raise ManifestError(f"line {lineno}: expected 'key = value'")
        if not key or any(c.isspace() for c in key):
            raise ManifestError(f"line {lineno}: bad key {key!r}")
        if key in out:
            raise ManifestError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def put_vector(pairs: list[tuple[str, str]], prefix: str, values: list[str]) -> None:
    """Append values as prefix.1 .. prefix.len(values)."""
    for j, v in enumerate(values, 1):
        pairs.append((f"{prefix}.{j}", v))


def get_vector(fields: dict[str, str], prefix: str) -> list[str]:
    """Collect prefix.1 .. prefix.n; indices must be contiguous from 1."""
    found: dict[int, str] = {}
    for key, value in fields.items():
        head, dot, idx = key.partition(".")
        if head == prefix and dot:
            try:
                j = int(idx)
            except ValueError:
                raise ManifestError(f"bad vector index in {key!r}") from None
            found[j] = value
    if sorted(found) != list(range(1, len(found) + 1)):
        raise ManifestError(f"vector {prefix!r} indices not contiguous from 1")
    return [found[j] for j in range(1, len(found) + 1)]


def need(fields: dict[str, str], key: str) -> str:
    if key not in fields:
        raise ManifestError(f"missing key {key!r}")
    return fields[key]
