import pytest
from hypothesis import given, strategies as st

from timelock.manifest import (
    ManifestError,
    bytes_to_hex,
    emit,
    get_vector,
    hex_to_bytes,
    hex_to_int,
    int_to_hex,
    need,
    parse,
    put_vector,
)


def test_int_encoding_frozen_forms():
    assert int_to_hex(0) == "0"
    assert int_to_hex(255) == "ff"
    assert int_to_hex(253) == "fd"
    assert int_to_hex(2**64) == "10000000000000000"


def test_int_decoding_is_strict():
    assert hex_to_int("0") == 0
    assert hex_to_int("ff") == 255
    for bad in ("", "FF", "0ff", "00", "0x1", "g1", " 1"):
        with pytest.raises(ManifestError):
            hex_to_int(bad)


def test_int_encoding_rejects_negative():
    with pytest.raises(ValueError):
        int_to_hex(-1)


@given(st.integers(min_value=0, max_value=2**512))
def test_int_round_trip(n):
    assert hex_to_int(int_to_hex(n)) == n


def test_bytes_encoding():
    assert bytes_to_hex(b"") == ""
    assert bytes_to_hex(b"\x00\xab") == "00ab"
    assert hex_to_bytes("00ab") == b"\x00\xab"
    for bad in ("f", "AB", "zz"):
        with pytest.raises(ManifestError):
            hex_to_bytes(bad)


@given(st.binary(max_size=100))
def test_bytes_round_trip(b):
    assert hex_to_bytes(bytes_to_hex(b)) == b


def test_emit_and_parse_round_trip():
    pairs = [("n", "fd"), ("note", ""), ("t", "3")]
    text = emit(pairs)
    assert text == "n = fd\nnote =\nt = 3\n"
    assert list(parse(text).items()) == pairs


def test_parse_rejects_duplicates_and_garbage():
    with pytest.raises(ManifestError):
        parse("a = 1\na = 2\n")
    with pytest.raises(ManifestError):
        parse("no separator here\n")
    with pytest.raises(ManifestError):
        parse(" = 1\n")


def test_parse_accepts_empty_value_form():
    fields = parse("k =\n")
    assert fields == {"k": ""}


def test_vector_round_trip_and_order():
    pairs = []
    put_vector(pairs, "t", ["a", "14", "28"])
    assert pairs == [("t.1", "a"), ("t.2", "14"), ("t.3", "28")]
    assert get_vector(parse(emit(pairs)), "t") == ["a", "14", "28"]


def test_vector_missing_and_gapped():
    assert get_vector({}, "t") == []
    with pytest.raises(ManifestError):
        get_vector({"t.1": "a", "t.3": "c"}, "t")
    with pytest.raises(ManifestError):
        get_vector({"t.0": "a", "t.1": "b"}, "t")


def test_need_reports_missing_key():
    fields = parse("n = fd\n")
    assert need(fields, "n") == "fd"
    with pytest.raises(ManifestError, match="t"):
        need(fields, "t")


@given(
    st.lists(
        st.tuples(
            st.from_regex(r"[a-z][a-z0-9.]{0,10}", fullmatch=True),
            st.from_regex(r"[0-9a-f]{0,20}", fullmatch=True),
        ),
        max_size=10,
        unique_by=lambda kv: kv[0],
    )
)
def test_emit_parse_round_trip_property(pairs):
    assert list(parse(emit(pairs)).items()) == pairs
