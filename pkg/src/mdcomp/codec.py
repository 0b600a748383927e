"""Bit-exact encoder/decoder for the model+delta container.

Layout (little-endian throughout, see docs/FORMAT.md for the worked dump):

  prelude:  magic "LECO" | version u8 | codec tag u8 (0 = model+delta)
  globals:  scheme u8 | family u8 | elem_width u8 | n u64 | m u64
            fixed scheme: L u64 / variable scheme: m * start u64
  per partition:
            family u8 | phi u8 | coeff_count u8 | coeff_count * f64
            [step only: first value i64]
            payload: ceil(len*phi/8) bytes of packed deltas
            corr_count u32 | corr_count * (pos u32, floor i64)

Deltas are offset-binary (delta + 2^(phi-1)); step partitions pack zigzag
diffs instead, with slot 0 always zero so slot i' sits at bit phi*i'.
"""

from __future__ import annotations

import math
import struct
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .bitpack import pack_bits, packed_size, unpack_bits, unpack_one
from .core import (
    IntSequence,
    ModelFamily,
    PartitionLayout,
    PartitionScheme,
    RegressionModel,
    evaluate,
    required_bits,
    residuals_array,
    zigzag_decode,
    zigzag_encode,
)
from .regressor import fit_family

MAGIC = b"LECO"
VERSION = 1
TAG_MODEL_DELTA = 0
TAG_FOR = 1
TAG_ELIAS_FANO = 2

_GLOBAL_FIXED = len(MAGIC) + 2 + 3 + 16  # prelude + scheme/family/width + n + m


class FormatError(ValueError):
    """Malformed or truncated container."""


class ModelDivergenceError(ValueError):
    """A residual does not fit the 64-bit delta domain."""


def _coeff_count(family: ModelFamily) -> int:
    return 0 if family is ModelFamily.STEP else family.arity


def partition_header_bits(family: ModelFamily,
                          scheme: PartitionScheme = PartitionScheme.VARIABLE) -> int:
    """Fixed per-partition overhead in bits: header fields, the correction
    count, and (variable scheme) the start-index table entry."""
    if family is ModelFamily.CUSTOM:
        raise ValueError("custom bases are not container-serializable")
    nbytes = 3 + 8 * _coeff_count(family) + (8 if family is ModelFamily.STEP else 0) + 4
    bits = 8 * nbytes
    if scheme is PartitionScheme.VARIABLE:
        bits += 64
    return bits


@dataclass
class Partition:
    start: int
    length: int
    model: RegressionModel
    phi: int
    payload: bytes
    corr_pos: np.ndarray    # uint32, partition-relative
    corr_floor: np.ndarray  # int64


@dataclass
class CompressedColumn:
    """Self-describing compressed column; ``data`` alone suffices to decode."""

    data: bytes
    scheme: PartitionScheme
    family: ModelFamily
    elem_width: int
    n: int
    fixed_len: int | None
    starts: list
    partitions: list = field(repr=False)

    @property
    def m(self) -> int:
        return len(self.partitions)

    def size_bytes(self) -> int:
        return len(self.data)

    def compression_ratio(self) -> float:
        return len(self.data) / (self.n * self.elem_width // 8)

    def model_delta_breakdown(self) -> tuple[int, int]:
        """(model_bytes, delta_bytes): header/metadata vs packed payload."""
        delta = sum(len(p.payload) for p in self.partitions)
        return len(self.data) - delta, delta

    def to_bytes(self) -> bytes:
        return self.data

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedColumn":
        return _parse(data)


# ---------------------------------------------------------------------------
# Encoding


def _model_predictions(model: RegressionModel, length: int) -> np.ndarray:
    preds = evaluate(model, np.arange(length))
    if not np.all(np.isfinite(preds)) or np.any(np.abs(preds) >= 2.0 ** 62):
        raise ModelDivergenceError("model divergence: prediction out of range")
    return np.floor(preds).astype(np.int64)


def _encode_partition(values: np.ndarray, model: RegressionModel,
                      out: bytearray) -> Partition:
    length = values.size
    family = model.family
    if family is ModelFamily.STEP:
        res = residuals_array(model, values)
        phi = required_bits(res)
        slots = zigzag_encode(res)
        corr_pos = np.empty(0, np.uint32)
        corr_floor = np.empty(0, np.int64)
    else:
        floors = _model_predictions(model, length)
        res = values - floors
        phi = required_bits(res)
        if phi > 64:
            raise ModelDivergenceError("model divergence: residual needs > 64 bits")
        if phi:
            offset = np.uint64(1) << np.uint64(phi - 1)
            # uint64 wraparound implements delta + 2^(phi-1) mod 2^64 exactly
            slots = res.astype(np.uint64) + offset
        else:
            slots = np.zeros(length, np.uint64)
        if family is ModelFamily.LINEAR and length > 1:
            t0, t1 = model.theta
            acc = _kernels.accumulate_floors(t0, t1, length)
            diff = np.nonzero(acc != floors)[0]
            corr_pos = diff.astype(np.uint32)
            corr_floor = floors[diff]
        else:
            corr_pos = np.empty(0, np.uint32)
            corr_floor = np.empty(0, np.int64)
    payload = pack_bits(slots, phi) if phi else b""

    out.append(int(family))
    out.append(phi)
    out.append(_coeff_count(family))
    for t in model.theta:
        out += struct.pack("<d", t)
    if family is ModelFamily.STEP:
        out += struct.pack("<q", model.first_value)
    out += payload
    out += struct.pack("<I", corr_pos.size)
    for p, f in zip(corr_pos.tolist(), corr_floor.tolist()):
        out += struct.pack("<Iq", p, f)
    return Partition(0, length, model, phi, payload, corr_pos, corr_floor)


def encode_column(seq, layout: PartitionLayout, family: ModelFamily,
                  models=None, elem_width: int = 64) -> CompressedColumn:
    """Compress ``seq`` under ``layout``; models are fit per partition unless
    supplied. Lossless: decode_all(encode_column(...)) == seq."""
    if isinstance(seq, IntSequence):
        values = seq.values
        elem_width = seq.elem_width
    else:
        values = np.ascontiguousarray(seq, dtype=np.int64)
    if layout.n != values.size:
        raise ValueError("layout does not cover the sequence")
    parts = layout.partitions()
    if models is not None and len(models) != len(parts):
        raise ValueError("models length must match partition count")

    out = bytearray()
    out += MAGIC
    out.append(VERSION)
    out.append(TAG_MODEL_DELTA)
    out.append(int(layout.scheme))
    out.append(int(family))
    out.append(elem_width)
    out += struct.pack("<QQ", values.size, len(parts))
    if layout.scheme is PartitionScheme.FIXED:
        out += struct.pack("<Q", layout.fixed_len)
    else:
        for a, _ in parts:
            out += struct.pack("<Q", a)

    partitions = []
    for j, (a, b) in enumerate(parts):
        chunk = values[a:b]
        model = models[j] if models is not None else fit_family(chunk, family).model
        part = _encode_partition(chunk, model, out)
        part.start = a
        partitions.append(part)

    return CompressedColumn(
        data=bytes(out), scheme=layout.scheme, family=family,
        elem_width=elem_width, n=values.size, fixed_len=layout.fixed_len,
        starts=[a for a, _ in parts], partitions=partitions)


# ---------------------------------------------------------------------------
# Parsing


def _take(data: bytes, off: int, count: int) -> int:
    if off + count > len(data):
        raise FormatError("truncated container")
    return off + count


def _parse(data: bytes) -> CompressedColumn:
    if len(data) < _GLOBAL_FIXED or data[:4] != MAGIC:
        raise FormatError("bad magic")
    if data[4] != VERSION:
        raise FormatError(f"unsupported version {data[4]}")
    if data[5] != TAG_MODEL_DELTA:
        raise FormatError(f"not a model+delta container (tag {data[5]})")
    scheme = PartitionScheme(data[6])
    family = ModelFamily(data[7])
    elem_width = data[8]
    if elem_width not in (32, 64):
        raise FormatError("bad element width")
    n, m = struct.unpack_from("<QQ", data, 9)
    off = 25
    fixed_len = None
    if scheme is PartitionScheme.FIXED:
        off = _take(data, off, 8)
        fixed_len = struct.unpack_from("<Q", data, off - 8)[0]
        if fixed_len < 1:
            raise FormatError("bad fixed length")
        starts = [j * fixed_len for j in range(m)]
    else:
        off = _take(data, off, 8 * m)
        starts = list(struct.unpack_from(f"<{m}Q", data, off - 8 * m))
        if starts != sorted(set(starts)) or (m and starts[0] != 0):
            raise FormatError("start index table not strictly increasing from 0")

    partitions = []
    for j in range(m):
        start = starts[j]
        end = starts[j + 1] if j + 1 < m else n
        length = end - start
        if length <= 0:
            raise FormatError("empty partition")
        off = _take(data, off, 3)
        pfam = ModelFamily(data[off - 3])
        phi = data[off - 2]
        ncoef = data[off - 1]
        if phi > 64:
            raise FormatError("bad bit width")
        off = _take(data, off, 8 * ncoef)
        theta = struct.unpack_from(f"<{ncoef}d", data, off - 8 * ncoef)
        first = None
        if pfam is ModelFamily.STEP:
            off = _take(data, off, 8)
            first = struct.unpack_from("<q", data, off - 8)[0]
        model = RegressionModel(pfam, theta, first_value=first)
        psize = packed_size(length, phi)
        off = _take(data, off, psize)
        payload = data[off - psize:off]
        off = _take(data, off, 4)
        ncorr = struct.unpack_from("<I", data, off - 4)[0]
        off = _take(data, off, 12 * ncorr)
        corr_pos = np.empty(ncorr, np.uint32)
        corr_floor = np.empty(ncorr, np.int64)
        for k in range(ncorr):
            corr_pos[k], corr_floor[k] = struct.unpack_from(
                "<Iq", data, off - 12 * ncorr + 12 * k)
        partitions.append(Partition(start, length, model, phi, payload,
                                    corr_pos, corr_floor))
    if sum(p.length for p in partitions) != n:
        raise FormatError("partition lengths do not sum to n")
    if off != len(data):
        raise FormatError("trailing bytes")
    return CompressedColumn(
        data=data, scheme=scheme, family=family, elem_width=elem_width,
        n=n, fixed_len=fixed_len, starts=starts, partitions=partitions)


# ---------------------------------------------------------------------------
# Decoding


def _unpack_deltas(part: Partition) -> np.ndarray:
    raw = unpack_bits(part.payload, part.phi, part.length)
    if part.model.family is ModelFamily.STEP:
        return zigzag_decode(raw)
    if part.phi == 0:
        return np.zeros(part.length, np.int64)
    offset = np.uint64(1) << np.uint64(part.phi - 1)
    return (raw - offset).view(np.int64)

def _decode_partition(part: Partition) -> np.ndarray:
    deltas = _unpack_deltas(part)
    if part.model.family is ModelFamily.STEP:
        deltas[0] = part.model.first_value
        return np.cumsum(deltas)
    floors = np.floor(evaluate(part.model, np.arange(part.length))).astype(np.int64)
    return floors + deltas


def decode_all(col: CompressedColumn) -> np.ndarray:
    """Decompress the whole column."""
    return np.concatenate([_decode_partition(p) for p in col.partitions])


def _locate(col: CompressedColumn, i: int) -> int:
    if col.scheme is PartitionScheme.FIXED:
        return i // col.fixed_len
    return bisect_right(col.starts, i) - 1


def decode_at(col: CompressedColumn, i: int) -> int:
    """Random access to position ``i`` (two memory touches for non-step
    families; step partitions scan from their start)."""
    if not 0 <= i < col.n:
        raise IndexError(f"position {i} out of range")
    part = col.partitions[_locate(col, i)]
    rel = i - part.start
    model = part.model
    if model.family is ModelFamily.STEP:
        raw = unpack_bits(part.payload, part.phi, rel + 1)
        return int(model.first_value + zigzag_decode(raw[1:]).sum())
    raw = unpack_one(part.payload, part.phi, rel)
    delta = raw - (1 << (part.phi - 1)) if part.phi else 0
    if model.family is ModelFamily.LINEAR:
        t0, t1 = model.theta
        return int(math.floor(t0 + t1 * rel)) + delta
    pred = int(np.floor(evaluate(model, np.arange(rel, rel + 1)))[0])
    return pred + delta


def decode_positions(col: CompressedColumn, indices) -> np.ndarray:
    """Vectorized point decode: semantically decode_at for every index."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size == 0:
        return np.empty(0, np.int64)
    if idx.min() < 0 or idx.max() >= col.n:
        raise IndexError("position out of range")
    out = np.empty(idx.size, np.int64)
    starts = np.asarray(col.starts, dtype=np.int64)
    pids = np.searchsorted(starts, idx, side="right") - 1
    for pid in np.unique(pids):
        part = col.partitions[pid]
        sel = pids == pid
        rel = idx[sel] - part.start
        if part.model.family is ModelFamily.STEP:
            vals = _decode_partition(part)
            out[sel] = vals[rel]
        else:
            deltas = _unpack_deltas(part)
            floors = np.floor(evaluate(part.model, rel)).astype(np.int64)
            out[sel] = floors + deltas[rel]
    return out


def decode_range(col: CompressedColumn, lo: int, hi: int) -> np.ndarray:
    """Decode positions [lo, hi); bit-exact equal to per-position decode.

    Linear partitions use slope accumulation (one float add per value) with
    the stored correction list fixing the positions where accumulated floors
    deviate from direct evaluation.
    """
    if not 0 <= lo <= hi <= col.n:
        raise IndexError("bad range")
    if lo == hi:
        return np.empty(0, np.int64)
    first = _locate(col, lo)
    last = _locate(col, hi - 1)
    chunks = []
    for pid in range(first, last + 1):
        part = col.partitions[pid]
        a = max(lo - part.start, 0)
        b = min(hi - part.start, part.length)
        if part.model.family is ModelFamily.LINEAR:
            t0, t1 = part.model.theta
            floors = _kernels.accumulate_floors(t0, t1, b)
            if part.corr_pos.size:
                mask = part.corr_pos < b
                floors[part.corr_pos[mask]] = part.corr_floor[mask]
            deltas = _unpack_deltas(part)
            chunks.append(floors[a:b] + deltas[a:b])
        else:
            chunks.append(_decode_partition(part)[a:b])
    return np.concatenate(chunks)


# ---------------------------------------------------------------------------
# Predicate pruning


@dataclass
class FilterStats:
    touched: int = 0


def filter_less_than(col: CompressedColumn, alpha: int,
                     stats: FilterStats | None = None) -> np.ndarray:
    """Positions with value < alpha, as a boolean bitmap.

    Linear partitions with non-negative slope stop decoding at the first k
    where theta0 + theta1*k - 2^(phi-1) > alpha: beyond it no value can be
    below alpha, so the remaining bits stay zero unexamined. Constant
    partitions are skipped wholesale by the same bound. Other families fall
    back to a full decode of the partition.
    """
    bitmap = np.zeros(col.n, dtype=bool)
    for part in col.partitions:
        fam = part.model.family
        half = float(1 << (part.phi - 1)) if part.phi else 0.0
        stop = part.length
        if fam is ModelFamily.LINEAR:
            t0, t1 = part.model.theta
            if t1 >= 0:
                if t0 - half > alpha:
                    stop = 0
                elif t1 > 0:
                    k = int(math.floor((alpha + half - t0) / t1)) + 1
                    stop = min(max(k, 0), part.length)
                    while stop < part.length and t0 + t1 * stop - half <= alpha:
                        stop += 1  # guard against float edge cases
        elif fam is ModelFamily.CONSTANT:
            t0 = part.model.theta[0]
            if t0 - half > alpha:
                stop = 0
        if stop == 0:
            continue
        vals = _decode_partition(part)[:stop] if stop < part.length \
            else _decode_partition(part)
        if stats is not None:
            stats.touched += stop
        sl = slice(part.start, part.start + stop)
        bitmap[sl] = vals < alpha
    return bitmap


# ---------------------------------------------------------------------------
# Size accounting


def predicted_container_bytes(col: CompressedColumn) -> int:
    """Reconstruct the byte size from the partition cost model; keeps the
    partitioner's S_M honest against the on-disk layout."""
    total = _GLOBAL_FIXED
    if col.scheme is PartitionScheme.FIXED:
        total += 8
    for part in col.partitions:
        hdr_bits = partition_header_bits(part.model.family, col.scheme)
        if col.scheme is PartitionScheme.VARIABLE:
            hdr_bits -= 64  # start table entry, counted per partition below
            total += 8
        total += hdr_bits // 8
        total += packed_size(part.length, part.phi)
        total += 12 * part.corr_pos.size
    return total
