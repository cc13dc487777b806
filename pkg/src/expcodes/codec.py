"""Bit-exact encoding of nonnegative-integer streams under any code description.

Container layout::

    b"XPC1" | u32 LE length of codespec JSON | codespec JSON
            | u64 LE symbol count | payload

The payload holds the concatenated codewords packed MSB-first, with the final
partial byte zero-padded.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Union

from .errors import CorruptStream, InvalidParameter, TruncatedStream
from .exp_huffman import FiniteCode, is_prefix_free
from .golomb import ONES, ZEROS, GolombCode
from .light_tail import UnaryEndedCode

MAGIC = b"XPC1"

CodeSpec = Union[GolombCode, UnaryEndedCode, FiniteCode]


def spec_to_json(spec: CodeSpec) -> str:
    return json.dumps(spec.to_dict(), separators=(",", ":"))


def spec_from_dict(d: dict) -> CodeSpec:
    kind = d.get("kind", "explicit" if "codewords" in d else None)
    if kind == "golomb":
        return GolombCode(int(d["k"]), d.get("prefix", ONES))
    if kind == "unary":
        return GolombCode(1, d.get("prefix", ONES))
    if kind == "unary_ended":
        code = UnaryEndedCode(tuple(d["head"]), d["continuation"])
        if "x" in d and int(d["x"]) != code.x:
            raise InvalidParameter(f"declared x = {d['x']} but the codewords give {code.x}")
        return code
    if kind == "explicit":
        words = tuple(d["codewords"])
        if any(set(w) - {"0", "1"} for w in words) or not is_prefix_free(words):
            raise InvalidParameter("explicit codewords must be distinct, prefix-free bit strings")
        return FiniteCode(words)
    raise InvalidParameter(f"unknown code kind {kind!r}")


def spec_from_json(text: str) -> CodeSpec:
    return spec_from_dict(json.loads(text))


def _codeword(spec: CodeSpec, symbol: int) -> str:
    if not isinstance(symbol, int) or symbol < 0:
        raise InvalidParameter(f"symbols must be nonnegative integers, got {symbol!r}")
    return spec.codeword(symbol)


@dataclass(frozen=True)
class EncodedStream:
    codespec: str        # JSON description of the code
    symbol_count: int
    payload: bytes
    bit_length: int

    def to_bytes(self) -> bytes:
        spec = self.codespec.encode("utf-8")
        return (MAGIC + struct.pack("<I", len(spec)) + spec
                + struct.pack("<Q", self.symbol_count) + self.payload)

    @classmethod
    def from_bytes(cls, data: bytes) -> "EncodedStream":
        if len(data) < 8:
            raise TruncatedStream("container shorter than its fixed header")
        if data[:4] != MAGIC:
            raise CorruptStream(f"bad magic {data[:4]!r}")
        (n,) = struct.unpack_from("<I", data, 4)
        if len(data) < 8 + n + 8:
            raise TruncatedStream("container ends inside its header")
        spec = data[8:8 + n].decode("utf-8")
        (count,) = struct.unpack_from("<Q", data, 8 + n)
        payload = bytes(data[16 + n:])
        return cls(spec, count, payload, 8 * len(payload))


def pack_bits(bits: str) -> bytes:
    if not bits:
        return b""
    pad = -len(bits) % 8
    return int(bits + "0" * pad, 2).to_bytes((len(bits) + pad) // 8, "big")


def unpack_bits(payload: bytes) -> str:
    if not payload:
        return ""
    return format(int.from_bytes(payload, "big"), "b").zfill(8 * len(payload))


def encode_bits(spec: CodeSpec, symbols: Iterable[int]) -> str:
    return "".join(_codeword(spec, s) for s in symbols)


def encode(spec: CodeSpec, symbols: Sequence[int]) -> EncodedStream:
    symbols = list(symbols)
    bits = encode_bits(spec, symbols)
    return EncodedStream(spec_to_json(spec), len(symbols), pack_bits(bits), len(bits))


class BitReader:
    """Sequential reader over an MSB-first bit string."""

    def __init__(self, bits: str):
        self.bits = bits
        self.pos = 0

    def read(self, n: int) -> str:
        end = self.pos + n
        if end > len(self.bits):
            raise TruncatedStream(f"needed {n} bits at offset {self.pos}, stream ended")
        out = self.bits[self.pos:end]
        self.pos = end
        return out

    def read_uint(self, n: int) -> int:
        return int(self.read(n), 2) if n else 0

    def read_run(self, bit: str) -> int:
        """Count ``bit`` characters up to the terminating opposite bit, consuming both."""
        stop = "0" if bit == "1" else "1"
        end = self.bits.find(stop, self.pos)
        if end < 0:
            raise TruncatedStream(f"run starting at offset {self.pos} never terminates")
        run = end - self.pos
        self.pos = end + 1
        return run


def _golomb_decoder(code: GolombCode):
    run_bit = "1" if code.prefix == ONES else "0"
    k, g, z = code.k, code.g, code.z

    def read(reader: BitReader) -> int:
        q = reader.read_run(run_bit)
        v = reader.read_uint(g - 1)
        if v >= z:
            v = 2 * v + reader.read_uint(1) - z
        return q * k + v

    return read


def _table_decoder(words: Sequence[str], on_match):
    table = {w: i for i, w in enumerate(words)}
    longest = max(len(w) for w in words)

    def read(reader: BitReader) -> int:
        start = reader.pos
        acc = ""
        while True:
            if acc in table:
                return on_match(table[acc], reader)
            if len(acc) >= longest:
                raise CorruptStream(f"bits at offset {start} match no codeword")
            acc += reader.read(1)

    return read


def symbol_decoder(spec: CodeSpec):
    """A function BitReader -> symbol reading exactly one codeword."""
    if isinstance(spec, GolombCode):
        return _golomb_decoder(spec)
    if isinstance(spec, UnaryEndedCode):
        head = list(spec.head_codewords)
        cont = len(head)

        def on_match(i, reader):
            if i < cont:
                return i
            return spec.r + 1 + reader.read_run("1")

        return _table_decoder(head + [spec.continuation_prefix], on_match)
    if isinstance(spec, FiniteCode):
        if len(spec.codewords) == 1:
            return lambda reader: 0
        return _table_decoder(spec.codewords, lambda i, reader: i)
    raise InvalidParameter(f"unsupported code description {spec!r}")


def decode(spec: CodeSpec, stream: EncodedStream) -> List[int]:
    bits = unpack_bits(stream.payload)
    reader = BitReader(bits)
    read = symbol_decoder(spec)
    out = [read(reader) for _ in range(stream.symbol_count)]
    rest = bits[reader.pos:]
    if len(rest) >= 8:
        raise CorruptStream(f"{len(rest)} unused bits after {stream.symbol_count} symbols")
    if "1" in rest:
        raise CorruptStream("nonzero padding bits after the last codeword")
    return out


def write_container(spec: CodeSpec, symbols: Sequence[int]) -> bytes:
    return encode(spec, symbols).to_bytes()


def read_container(data: bytes):
    """Returns (spec, symbols)."""
    stream = EncodedStream.from_bytes(data)
    spec = spec_from_json(stream.codespec)
    return spec, decode(spec, stream)
