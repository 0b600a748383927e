"""Fixed-width bit packing, LSB-first within a byte, little-endian across bytes.

Value k occupies bits [width*k, width*(k+1)) of the stream; bit b of the
stream lives in byte b//8 at in-byte position b%8.
"""

from __future__ import annotations

import numpy as np


def pack_bits(values, width: int) -> bytes:
    """Pack unsigned ``values`` at ``width`` bits each."""
    if not 0 <= width <= 64:
        raise ValueError("width must be in [0, 64]")
    vals = np.asarray(values, dtype=np.uint64)
    if width == 0:
        if vals.size and vals.max() != 0:
            raise ValueError("non-zero value at width 0")
        return b""
    if width < 64 and vals.size and int(vals.max()) >= (1 << width):
        raise ValueError(f"value does not fit in {width} bits")
    shifts = np.arange(width, dtype=np.uint64)
    bits = ((vals[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)
    return np.packbits(bits.ravel(), bitorder="little").tobytes()


def unpack_bits(data: bytes, width: int, count: int) -> np.ndarray:
    """Inverse of pack_bits; returns a uint64 array of length ``count``."""
    if width == 0:
        return np.zeros(count, dtype=np.uint64)
    total = width * count
    if len(data) * 8 < total:
        raise ValueError("payload too short for requested count")
    raw = np.frombuffer(data, dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little", count=total)
    bits = bits.reshape(count, width).astype(np.uint64)
    weights = np.uint64(1) << np.arange(width, dtype=np.uint64)
    return bits @ weights


def unpack_one(data: bytes, width: int, index: int) -> int:
    """Extract a single value without touching the rest of the payload."""
    if width == 0:
        return 0
    start = width * index
    first = start >> 3
    last = (start + width - 1) >> 3
    chunk = int.from_bytes(data[first:last + 1], "little")
    return (chunk >> (start & 7)) & ((1 << width) - 1)


def packed_size(count: int, width: int) -> int:
    """Payload bytes for ``count`` values at ``width`` bits."""
    return (count * width + 7) // 8
