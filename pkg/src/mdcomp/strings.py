"""Order-preserving string compression layered on the integer codec.

Strings in a partition share a common prefix (stored once in the header) and
a character set; post-prefix characters become digits of a base-2^m integer
so that modulo/division in decoding reduce to shift-and-mask. Variable
lengths are handled by adaptive padding: the stored integer is nudged toward
the model's prediction within the [min-padded, max-padded] interval, which
keeps every padded value decodable and shrinks the delta.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .bitpack import pack_bits, packed_size, unpack_bits, unpack_one
from .codec import MAGIC, VERSION, CompressedColumn, FormatError, decode_all, \
    decode_at, encode_column
from .core import ModelFamily, PartitionLayout, PartitionScheme, evaluate
from .regressor import fit_family

TAG_STRING = 3


class UnmappableCharacterError(ValueError):
    pass


class MappingOverflowError(ValueError):
    """Post-prefix value does not fit the unsigned 63-bit carrier."""


@dataclass(frozen=True)
class StringPartitionHeader:
    common_prefix: bytes
    base_exponent: int          # m, base M = 2^m
    max_padded_len: int         # post-prefix characters per value
    charset: bytes              # sorted distinct characters, index = digit

    def __post_init__(self):
        if bytes(sorted(set(self.charset))) != self.charset:
            raise ValueError("charset must be sorted and duplicate-free")
        if len(self.charset) > (1 << self.base_exponent):
            raise ValueError("charset larger than base")

    @property
    def char_map(self) -> dict[int, int]:
        return {c: i for i, c in enumerate(self.charset)}


def _as_bytes(s) -> bytes:
    return s.encode("utf-8") if isinstance(s, str) else bytes(s)


def _common_prefix(items: list[bytes]) -> bytes:
    first, last = min(items), max(items)
    k = 0
    while k < min(len(first), len(last)) and first[k] == last[k]:
        k += 1
    return first[:k]


def derive_header(strings) -> StringPartitionHeader:
    """Per-partition header: common prefix, sorted charset, base 2^m."""
    items = [_as_bytes(s) for s in strings]
    if not items:
        raise ValueError("empty partition")
    prefix = _common_prefix(items)
    suffixes = [s[len(prefix):] for s in items]
    charset = bytes(sorted({c for s in suffixes for c in s}))
    m = max(len(charset) - 1, 0).bit_length()
    max_len = max((len(s) for s in suffixes), default=0)
    if m and max_len > 63 // m:
        raise MappingOverflowError(
            f"mapping overflow: {max_len} chars at base 2^{m} exceed 63 bits")
    return StringPartitionHeader(prefix, m, max_len, charset)


def map_string_to_int(s, header: StringPartitionHeader) -> int:
    """Base-M positional value of the post-prefix chars under min padding."""
    lo, _ = _map_bounds(s, header)
    return lo


def _map_bounds(s, header: StringPartitionHeader) -> tuple[int, int]:
    """(min-padded, max-padded) integer values of one string."""
    raw = _as_bytes(s)
    if not raw.startswith(header.common_prefix):
        raise UnmappableCharacterError("string missing the partition prefix")
    suffix = raw[len(header.common_prefix):]
    if len(suffix) > header.max_padded_len:
        raise MappingOverflowError("string longer than max_padded_len")
    m = header.base_exponent
    cmap = header.char_map
    value = 0
    for c in suffix:
        if c not in cmap:
            raise UnmappableCharacterError(f"unmappable character {c:#x}")
        value = (value << m) | cmap[c]
    pad = header.max_padded_len - len(suffix)
    lo = value << (m * pad)
    hi = lo
    if pad and m:
        top = len(header.charset) - 1
        for k in range(pad):
            hi |= top << (m * k)
    return lo, hi


def _digits_to_string(value: int, length: int,
                      header: StringPartitionHeader) -> bytes:
    m = header.base_exponent
    mask = (1 << m) - 1
    chars = bytearray()
    for j in range(length):
        shift = m * (header.max_padded_len - 1 - j)
        chars.append(header.charset[(value >> shift) & mask])
    return header.common_prefix + bytes(chars)


@dataclass
class StringColumn:
    data: bytes
    header: StringPartitionHeader
    n: int
    lengths_payload: bytes
    length_bits: int
    int_column: CompressedColumn

    def size_bytes(self) -> int:
        return len(self.data)

    def to_bytes(self) -> bytes:
        return self.data

    @classmethod
    def from_bytes(cls, data: bytes) -> "StringColumn":
        return _parse_string(data)


def encode_string_partition(strings, family: ModelFamily = ModelFamily.LINEAR,
                            elem_width: int = 64) -> StringColumn:
    """One partition of strings as header + lengths + integer container.

    The model is fit on the min-padded values; each stored value is then the
    floored prediction clamped into that string's [min-padded, max-padded]
    interval. Predictions inside the interval give a zero delta, the rest
    take the nearer endpoint, so the per-string error never exceeds the
    always-min or always-max padding policy.
    """
    items = [_as_bytes(s) for s in strings]
    header = derive_header(items)
    bounds = [_map_bounds(s, header) for s in items]
    lo = np.array([b[0] for b in bounds], dtype=np.int64)
    hi = np.array([b[1] for b in bounds], dtype=np.int64)
    n = lo.size

    fit = fit_family(lo, family)
    if family is ModelFamily.STEP:
        stored = np.empty(n, dtype=np.int64)
        stored[0] = lo[0]
        for i in range(1, n):
            stored[i] = min(max(int(stored[i - 1]), int(lo[i])), int(hi[i]))
    else:
        pred = np.floor(evaluate(fit.model, np.arange(n))).astype(np.int64)
        stored = np.minimum(np.maximum(pred, lo), hi)

    layout = PartitionLayout((0, n), PartitionScheme.FIXED, fixed_len=n)
    models = None if family is ModelFamily.STEP else [fit.model]
    int_col = encode_column(stored, layout, family, models=models,
                            elem_width=elem_width)

    length_bits = header.max_padded_len.bit_length()
    lengths = np.array([len(s) - len(header.common_prefix) for s in items],
                       dtype=np.uint64)
    lengths_payload = pack_bits(lengths, length_bits)

    out = bytearray()
    out += MAGIC
    out.append(VERSION)
    out.append(TAG_STRING)
    out += struct.pack("<H", len(header.common_prefix))
    out += header.common_prefix
    out.append(header.base_exponent)
    out += struct.pack("<H", len(header.charset))
    out += header.charset
    out.append(header.max_padded_len)
    out += struct.pack("<Q", n)
    out += lengths_payload
    out += int_col.to_bytes()
    return StringColumn(bytes(out), header, n, lengths_payload, length_bits,
                        int_col)


def _parse_string(data: bytes) -> StringColumn:
    if len(data) < 6 or data[:4] != MAGIC or data[4] != VERSION \
            or data[5] != TAG_STRING:
        raise FormatError("not a string container")
    off = 6
    (plen,) = struct.unpack_from("<H", data, off)
    off += 2
    prefix = data[off:off + plen]
    off += plen
    m = data[off]
    off += 1
    (clen,) = struct.unpack_from("<H", data, off)
    off += 2
    charset = data[off:off + clen]
    off += clen
    max_len = data[off]
    off += 1
    (n,) = struct.unpack_from("<Q", data, off)
    off += 8
    header = StringPartitionHeader(prefix, m, max_len, charset)
    length_bits = max_len.bit_length()
    lsize = packed_size(n, length_bits)
    lengths_payload = data[off:off + lsize]
    off += lsize
    int_col = CompressedColumn.from_bytes(data[off:])
    if int_col.n != n:
        raise FormatError("length mismatch with embedded container")
    return StringColumn(data, header, n, lengths_payload, length_bits, int_col)


def decode_string_at(col: StringColumn, i: int) -> str:
    if not 0 <= i < col.n:
        raise IndexError("position out of range")
    value = decode_at(col.int_column, i)
    length = unpack_one(col.lengths_payload, col.length_bits, i)
    return _digits_to_string(value, length, col.header).decode("utf-8")


def decode_all_strings(col: StringColumn) -> list[str]:
    values = decode_all(col.int_column)
    lengths = unpack_bits(col.lengths_payload, col.length_bits, col.n)
    return [_digits_to_string(int(v), int(l), col.header).decode("utf-8")
            for v, l in zip(values, lengths)]
