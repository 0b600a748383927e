"""Reference codecs for benchmark comparison: FOR, Delta (fixed/variable
partitioned), and Elias-Fano for monotone sequences.

Delta reuses the model+delta container with the step family; FOR and
Elias-Fano have their own container tags under the shared framing.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .bitpack import pack_bits, packed_size, unpack_bits, unpack_one
from .codec import (
    MAGIC,
    TAG_ELIAS_FANO,
    TAG_FOR,
    VERSION,
    CompressedColumn,
    FormatError,
    encode_column,
)
from .core import IntSequence, ModelFamily, PartitionScheme
from .partitioner import PartitionCostModel, default_cost_model, partition_fixed, \
    partition_variable


class NotSortedError(ValueError):
    """Elias-Fano requires a non-decreasing sequence."""


def _as_values(seq) -> np.ndarray:
    if isinstance(seq, IntSequence):
        return seq.values
    return np.ascontiguousarray(seq, dtype=np.int64)


# ---------------------------------------------------------------------------
# Frame-of-Reference


@dataclass
class ForColumn:
    data: bytes
    elem_width: int
    n: int
    frame_len: int
    bases: np.ndarray    # int64 per frame
    widths: np.ndarray   # uint8 per frame
    payloads: list

    @property
    def m(self) -> int:
        return len(self.payloads)

    def size_bytes(self) -> int:
        return len(self.data)

    def compression_ratio(self) -> float:
        return len(self.data) / (self.n * self.elem_width // 8)

    def model_delta_breakdown(self) -> tuple[int, int]:
        delta = sum(len(p) for p in self.payloads)
        return len(self.data) - delta, delta

    def to_bytes(self) -> bytes:
        return self.data

    @classmethod
    def from_bytes(cls, data: bytes) -> "ForColumn":
        return _parse_for(data)


def for_frame_width(values) -> int:
    """Unsigned bits per offset in one frame: ceil(log2(max-min+1))."""
    values = _as_values(values)
    return int(int(values.max()) - int(values.min())).bit_length()


def for_encode(seq, frame_len: int = 1024, elem_width: int = 64) -> ForColumn:
    """v_i - v_min per frame, bit-packed at the frame's offset width."""
    if isinstance(seq, IntSequence):
        values = seq.values
        elem_width = seq.elem_width
    else:
        values = _as_values(seq)
    if frame_len < 1:
        raise ValueError("frame_len must be >= 1")
    n = values.size
    out = bytearray()
    out += MAGIC
    out.append(VERSION)
    out.append(TAG_FOR)
    out.append(elem_width)
    out += struct.pack("<QQ", n, frame_len)
    bases, widths, payloads = [], [], []
    for a in range(0, n, frame_len):
        frame = values[a:a + frame_len]
        base = int(frame.min())
        width = int(int(frame.max()) - base).bit_length()
        payload = pack_bits((frame - base).astype(np.uint64), width)
        out += struct.pack("<qB", base, width)
        out += payload
        bases.append(base)
        widths.append(width)
        payloads.append(payload)
    return ForColumn(bytes(out), elem_width, n, frame_len,
                     np.array(bases, np.int64), np.array(widths, np.uint8),
                     payloads)


def _parse_for(data: bytes) -> ForColumn:
    if len(data) < 23 or data[:4] != MAGIC or data[4] != VERSION or data[5] != TAG_FOR:
        raise FormatError("not a FOR container")
    elem_width = data[6]
    n, frame_len = struct.unpack_from("<QQ", data, 7)
    off = 23
    bases, widths, payloads = [], [], []
    pos = 0
    while pos < n:
        length = min(frame_len, n - pos)
        if off + 9 > len(data):
            raise FormatError("truncated container")
        base, width = struct.unpack_from("<qB", data, off)
        off += 9
        psize = packed_size(length, width)
        if off + psize > len(data):
            raise FormatError("truncated container")
        payloads.append(data[off:off + psize])
        off += psize
        bases.append(base)
        widths.append(width)
        pos += length
    if off != len(data):
        raise FormatError("trailing bytes")
    return ForColumn(data, elem_width, n, frame_len,
                     np.array(bases, np.int64), np.array(widths, np.uint8),
                     payloads)


def for_decode_all(col: ForColumn) -> np.ndarray:
    chunks = []
    pos = 0
    for j, payload in enumerate(col.payloads):
        length = min(col.frame_len, col.n - pos)
        offs = unpack_bits(payload, int(col.widths[j]), length).astype(np.int64)
        chunks.append(col.bases[j] + offs)
        pos += length
    return np.concatenate(chunks)


def for_decode_at(col: ForColumn, i: int) -> int:
    if not 0 <= i < col.n:
        raise IndexError("position out of range")
    j, rel = divmod(i, col.frame_len)
    return int(col.bases[j]) + unpack_one(col.payloads[j], int(col.widths[j]), rel)


# ---------------------------------------------------------------------------
# Delta encoding (fixed and variable partitioned step models)


def delta_fix_encode(seq, partition_len: int = 1024) -> CompressedColumn:
    values = _as_values(seq)
    layout = partition_fixed(values, partition_len)
    return encode_column(seq, layout, ModelFamily.STEP)


def delta_var_encode(seq, cost_model: PartitionCostModel | None = None) -> CompressedColumn:
    values = _as_values(seq)
    if cost_model is None:
        cost_model = default_cost_model(ModelFamily.STEP, PartitionScheme.VARIABLE)
    layout = partition_variable(values, ModelFamily.STEP, cost_model)
    return encode_column(seq, layout, ModelFamily.STEP)


# ---------------------------------------------------------------------------
# Elias-Fano


@dataclass
class EliasFanoColumn:
    data: bytes
    elem_width: int
    n: int
    v_min: int
    ell: int
    n_buckets: int
    low_payload: bytes
    upper_bits: np.ndarray       # uint8 bit array of the unary stream
    sample_pos: np.ndarray       # bit position of every 256th set bit
    sample_zeros: np.ndarray     # zeros before that set bit

    def size_bytes(self) -> int:
        return len(self.data)

    def compression_ratio(self) -> float:
        return len(self.data) / (self.n * self.elem_width // 8)

    def bits_per_element(self) -> float:
        return len(self.data) * 8 / self.n

    def model_delta_breakdown(self) -> tuple[int, int]:
        delta = len(self.low_payload) + (len(self.upper_bits) + 7) // 8
        return len(self.data) - delta, delta

    def to_bytes(self) -> bytes:
        return self.data

    @classmethod
    def from_bytes(cls, data: bytes) -> "EliasFanoColumn":
        return _parse_ef(data)


def _ef_ell(value_range: int, n: int) -> int:
    """Smallest ell with n * 2^ell >= range, i.e. ceil(log2(range/n)), >= 0."""
    ell = 0
    while (n << ell) < value_range:
        ell += 1
    return ell


_EF_SAMPLE = 256


def ef_encode(seq, elem_width: int = 64) -> EliasFanoColumn:
    """Quasi-succinct encoding of a non-decreasing sequence."""
    if isinstance(seq, IntSequence):
        values = seq.values
        elem_width = seq.elem_width
    else:
        values = _as_values(seq)
    if np.any(np.diff(values) < 0):
        raise NotSortedError("input not sorted")
    n = values.size
    v_min = int(values[0])
    value_range = int(values[-1]) - v_min
    ell = _ef_ell(value_range, n)
    offs = (values - v_min).astype(np.uint64)
    low = offs & np.uint64((1 << ell) - 1) if ell else np.zeros(n, np.uint64)
    high = (offs >> np.uint64(ell)).astype(np.int64)
    n_buckets = int(high[-1]) + 1
    counts = np.bincount(high, minlength=n_buckets)

    total_bits = n + n_buckets
    bits = np.ones(total_bits, dtype=np.uint8)
    zero_pos = np.cumsum(counts) + np.arange(n_buckets)
    bits[zero_pos] = 0
    upper_bytes = np.packbits(bits, bitorder="little").tobytes()
    low_payload = pack_bits(low, ell)

    out = bytearray()
    out += MAGIC
    out.append(VERSION)
    out.append(TAG_ELIAS_FANO)
    out.append(elem_width)
    out += struct.pack("<QqBQ", n, v_min, ell, n_buckets)
    out += low_payload
    out += upper_bytes
    col = EliasFanoColumn(bytes(out), elem_width, n, v_min, ell, n_buckets,
                          low_payload, bits, *_ef_samples(bits))
    return col


def _ef_samples(bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ones = np.nonzero(bits)[0]
    sample_pos = ones[::_EF_SAMPLE]
    sample_zeros = sample_pos - np.arange(0, ones.size, _EF_SAMPLE)
    return sample_pos, sample_zeros


def _parse_ef(data: bytes) -> EliasFanoColumn:
    if len(data) < 32 or data[:4] != MAGIC or data[4] != VERSION \
            or data[5] != TAG_ELIAS_FANO:
        raise FormatError("not an Elias-Fano container")
    elem_width = data[6]
    n, v_min, ell, n_buckets = struct.unpack_from("<QqBQ", data, 7)
    off = 32
    low_size = packed_size(n, ell)
    total_bits = n + n_buckets
    upper_size = (total_bits + 7) // 8
    if off + low_size + upper_size != len(data):
        raise FormatError("truncated container")
    low_payload = data[off:off + low_size]
    raw = np.frombuffer(data, np.uint8, count=upper_size, offset=off + low_size)
    bits = np.unpackbits(raw, bitorder="little", count=total_bits)
    return EliasFanoColumn(data, elem_width, n, v_min, ell, n_buckets,
                           low_payload, bits, *_ef_samples(bits))


def ef_access(col: EliasFanoColumn, i: int) -> int:
    """Reconstruct value i: select the i-th set bit of the unary stream
    (sampled select + linear scan), combine bucket index with low bits."""
    if not 0 <= i < col.n:
        raise IndexError("position out of range")
    s = i // _EF_SAMPLE
    pos = int(col.sample_pos[s])
    zeros = int(col.sample_zeros[s])
    ones = s * _EF_SAMPLE
    bits = col.upper_bits
    while True:
        if bits[pos]:
            ones += 1
            if ones == i + 1:
                break
        else:
            zeros += 1
        pos += 1
    bucket = zeros
    low = unpack_one(col.low_payload, col.ell, i)
    return col.v_min + (bucket << col.ell) + low


def ef_decode_all(col: EliasFanoColumn) -> np.ndarray:
    counts = np.diff(np.concatenate([[0], np.nonzero(col.upper_bits == 0)[0]])) - 1
    counts[0] += 1  # first zero has no preceding zero marker
    high = np.repeat(np.arange(col.n_buckets, dtype=np.int64), counts)
    low = unpack_bits(col.low_payload, col.ell, col.n).astype(np.int64)
    return col.v_min + (high << col.ell) + low


def ef_lower_bit_strings(col: EliasFanoColumn) -> list[str]:
    """Per-value low bits as MSB-first binary strings (presentation helper)."""
    low = unpack_bits(col.low_payload, col.ell, col.n)
    return [format(int(x), f"0{col.ell}b") if col.ell else "" for x in low]


def ef_upper_unary_strings(col: EliasFanoColumn) -> list[str]:
    """Per-bucket unary runs ('1'*count + '0') of the upper-bit stream."""
    counts = np.bincount(
        (np.asarray(ef_decode_all(col)) - col.v_min) >> col.ell,
        minlength=col.n_buckets)
    return ["1" * int(c) + "0" for c in counts]
