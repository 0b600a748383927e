"""Synthetic dataset generation and file loading for the benchmark harness.

Binary dataset files are an 8-byte little-endian count followed by the
values at the declared width; text files hold one decimal per line.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import IntSequence


class DatasetFormatError(ValueError):
    pass


def generate(kind: str, n: int, seed: int = 0, **params) -> IntSequence:
    """Deterministic synthetic datasets: linear, normal, poisson."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if kind == "linear":
        slope = params.get("slope", 17.0)
        jitter = params.get("jitter", 8.0)
        values = np.round(slope * np.arange(n)).astype(np.int64)
        if jitter:
            values = values + rng.integers(-int(jitter), int(jitter) + 1, size=n)
        values.sort()
    elif kind == "normal":
        scale = params.get("scale", 1e7)
        values = np.sort(np.round(rng.normal(0.0, scale, size=n)).astype(np.int64))
    elif kind == "poisson":
        lam = params.get("lam", 1.0)
        if lam <= 0:
            raise ValueError("lam must be positive")
        gaps = rng.exponential(1.0 / lam, size=n)
        values = np.ceil(np.cumsum(gaps) * params.get("resolution", 1e6)) \
            .astype(np.int64)
    else:
        raise ValueError(f"unknown dataset kind: {kind}")
    return IntSequence(values)


def save_dataset(seq: IntSequence, path, fmt: str = "bin64") -> None:
    values = seq.values if isinstance(seq, IntSequence) else np.asarray(seq, np.int64)
    path = Path(path)
    if fmt == "text":
        path.write_text("".join(f"{int(v)}\n" for v in values))
        return
    if fmt not in ("bin32", "bin64"):
        raise ValueError(f"unknown format: {fmt}")
    dtype = np.int32 if fmt == "bin32" else np.int64
    with open(path, "wb") as f:
        f.write(struct.pack("<Q", values.size))
        f.write(values.astype(dtype).tobytes())


def load_dataset(path, fmt: str = "bin64") -> IntSequence:
    path = Path(path)
    raw = path.read_bytes()
    if not raw:
        raise DatasetFormatError("empty file")
    if fmt == "text":
        try:
            values = np.array([int(line) for line in raw.decode().split()],
                              dtype=np.int64)
        except (UnicodeDecodeError, ValueError) as e:
            raise DatasetFormatError(f"parse failure: {e}") from e
        if values.size == 0:
            raise DatasetFormatError("empty file")
        return IntSequence(values)
    if fmt not in ("bin32", "bin64"):
        raise ValueError(f"unknown format: {fmt}")
    width = 4 if fmt == "bin32" else 8
    if len(raw) < 8:
        raise DatasetFormatError("truncated file")
    (n,) = struct.unpack_from("<Q", raw, 0)
    if len(raw) != 8 + n * width:
        raise DatasetFormatError("truncated file")
    dtype = np.dtype("<i4") if fmt == "bin32" else np.dtype("<i8")
    values = np.frombuffer(raw, dtype, count=n, offset=8).astype(np.int64)
    return IntSequence(values, elem_width=width * 8)
