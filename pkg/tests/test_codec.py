import json
import random
import struct

import pytest
from hypothesis import given, settings, strategies as st

from expcodes import (EncodedStream, GolombCode, PoissonSource, build_unary_ended, decode, encode,
                      exp_huffman, read_container, spec_from_dict, write_container)
from expcodes.batteries import codec_cases, geometric_sample
from expcodes.codec import BitReader, pack_bits, spec_to_json, unpack_bits
from expcodes.errors import CorruptStream, InvalidParameter, TruncatedStream
from expcodes.golomb import ZEROS
from expcodes.light_tail import UnaryEndedCode


def test_g3_example():
    s = encode(GolombCode(3), [0, 4, 7])
    bits = unpack_bits(s.payload)
    assert s.bit_length == 11
    assert bits == "00" + "1010" + "11010" + "00000"
    assert bits.startswith("0010101101")
    assert s.payload == bytes([0b00101011, 0b01000000])
    assert decode(GolombCode(3), s) == [0, 4, 7]


def test_unary_example():
    s = encode(GolombCode(1), [2])
    assert unpack_bits(s.payload)[:s.bit_length] == "110"


def test_empty_stream():
    for spec in (GolombCode(3), exp_huffman([0.5, 0.5], 1.0)):
        s = encode(spec, [])
        assert s.payload == b"" and s.symbol_count == 0
        assert decode(spec, s) == []
        assert read_container(write_container(spec, []))[1] == []


def test_singleton_alphabet_null_codeword():
    spec = exp_huffman([1.0], 2.0)
    s = encode(spec, [0, 0, 0])
    assert s.bit_length == 0
    assert decode(spec, s) == [0, 0, 0]


def test_out_of_alphabet():
    with pytest.raises(InvalidParameter):
        encode(exp_huffman([0.5, 0.5], 1.0), [2])
    with pytest.raises(InvalidParameter):
        encode(GolombCode(2), [-1])


def test_truncated_payload():
    # 17 bits fill three bytes; losing the last bit drops a whole byte
    symbols = [0, 4, 7, 4, 0]
    s = encode(GolombCode(3), symbols)
    assert s.bit_length == 17
    bits = unpack_bits(s.payload)[:s.bit_length - 1]
    short = EncodedStream(s.codespec, s.symbol_count, pack_bits(bits), len(bits))
    with pytest.raises(TruncatedStream):
        decode(GolombCode(3), short)
    with pytest.raises(TruncatedStream):
        read_container(write_container(GolombCode(3), [5, 9, 2, 40])[:-2])


def test_truncated_unary_run():
    s = encode(GolombCode(1), [30])
    cut = EncodedStream(s.codespec, 1, s.payload[:2], 16)
    with pytest.raises(TruncatedStream):
        decode(GolombCode(1), cut)


def test_nonzero_padding():
    s = encode(GolombCode(3), [0])
    bad = EncodedStream(s.codespec, 1, bytes([s.payload[0] | 1]), 8)
    with pytest.raises(CorruptStream):
        decode(GolombCode(3), bad)


def test_trailing_bytes():
    s = encode(GolombCode(3), [0])
    bad = EncodedStream(s.codespec, 1, s.payload + b"\x00", 16)
    with pytest.raises(CorruptStream):
        decode(GolombCode(3), bad)


def test_container_layout():
    spec = GolombCode(3)
    blob = write_container(spec, [0, 4, 7])
    n = struct.unpack_from("<I", blob, 4)[0]
    assert blob[:4] == b"XPC1"
    assert json.loads(blob[8:8 + n]) == {"kind": "golomb", "k": 3, "prefix": "ones"}
    assert struct.unpack_from("<Q", blob, 8 + n)[0] == 3
    assert blob[16 + n:] == bytes([0b00101011, 0b01000000])
    with pytest.raises(CorruptStream):
        read_container(b"XPC2" + blob[4:])
    with pytest.raises(TruncatedStream):
        read_container(blob[:6])


@pytest.mark.parametrize("d", [
    {"kind": "golomb", "k": 5, "prefix": "zeros"},
    {"kind": "unary", "prefix": "ones"},
    {"kind": "unary_ended", "head": ["01", "00", "10"], "continuation": "11", "x": 1},
    {"kind": "explicit", "codewords": ["0", "10", "11"]},
])
def test_spec_roundtrip(d):
    spec = spec_from_dict(d)
    assert spec.to_dict() == d
    assert json.loads(spec_to_json(spec)) == d


@pytest.mark.parametrize("d", [
    {"kind": "explicit", "codewords": ["0", "01"]},
    {"kind": "explicit", "codewords": ["0", "2"]},
    {"kind": "unary_ended", "head": ["0"], "continuation": "1", "x": 7},
    {"kind": "huffman"},
])
def test_spec_rejects(d):
    with pytest.raises(InvalidParameter):
        spec_from_dict(d)


def test_bit_reader():
    r = BitReader("1110010")
    assert r.read_run("1") == 3
    assert r.read_uint(2) == 1
    with pytest.raises(TruncatedStream):
        r.read(5)


def test_roundtrip_g7_geometric():
    rng = random.Random(11)
    symbols = [geometric_sample(rng, 0.9) for _ in range(100_000)]
    s = encode(GolombCode(7), symbols)
    assert s.bit_length == sum(GolombCode(7).length(x) for x in symbols)
    assert decode(GolombCode(7), s) == symbols


@pytest.mark.parametrize("idx", range(5))
def test_roundtrip_every_kind(idx):
    label, spec, symbols = codec_cases(random.Random(5), 100_000)[idx]
    blob = write_container(spec, symbols)
    spec2, back = read_container(blob)
    assert back == symbols, label
    assert spec2.to_dict() == spec.to_dict()
    assert encode(spec, symbols).bit_length == sum(len(spec.codeword(x)) for x in symbols)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 500), max_size=60), st.integers(1, 40), st.sampled_from(["ones", "zeros"]))
def test_roundtrip_golomb_property(symbols, k, prefix):
    spec = GolombCode(k, prefix)
    assert decode(spec, encode(spec, symbols)) == symbols


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 60), max_size=60))
def test_roundtrip_unary_ended_property(symbols):
    spec = build_unary_ended(PoissonSource(2.0), 1.5)
    assert read_container(write_container(spec, symbols))[1] == symbols
