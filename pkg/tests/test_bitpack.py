import numpy as np
import pytest
from hypothesis import given, strategies as st

from mdcomp.bitpack import pack_bits, packed_size, unpack_bits, unpack_one


def test_known_layout():
    # slots [1,2,3] at width 2, LSB-first: 1 | 2<<2 | 3<<4 = 0x39
    data = pack_bits(np.array([1, 2, 3], dtype=np.uint64), 2)
    assert data == bytes([0x39])


def test_packed_size():
    assert packed_size(4, 2) == 1
    assert packed_size(5, 2) == 2
    assert packed_size(10, 0) == 0
    assert packed_size(3, 64) == 24


@given(st.integers(1, 64), st.lists(st.integers(0, 2**64 - 1), min_size=1,
                                    max_size=100))
def test_pack_roundtrip(width, raw):
    slots = np.array([v & ((1 << width) - 1) if width < 64 else v
                      for v in raw], dtype=np.uint64)
    data = pack_bits(slots, width)
    assert len(data) == packed_size(slots.size, width)
    back = unpack_bits(data, width, slots.size)
    assert np.array_equal(back, slots)
    for i in (0, slots.size // 2, slots.size - 1):
        assert unpack_one(data, width, i) == int(slots[i])


def test_width_zero():
    assert pack_bits(np.zeros(5, np.uint64), 0) == b""
    assert unpack_bits(b"", 0, 5).tolist() == [0] * 5
    assert unpack_one(b"", 0, 3) == 0
