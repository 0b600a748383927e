"""Benchmark harness: compress / random access / full decode measurement.

Protocol: compressed/uncompressed ratio, N uniformly-random accesses with a
seeded index stream (N defaults to the dataset size), a full decode pass,
three repetitions averaged, single thread. Roundtrip is verified before any
timing and a mismatch aborts the run.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import baselines, codec
from .core import IntSequence, ModelFamily, PartitionScheme
from .partitioner import PartitionCostModel, default_cost_model, \
    partition_fixed, partition_variable

CODECS = ("leco-fix", "leco-var", "for", "delta-fix", "delta-var", "ef")

CSV_COLUMNS = ("dataset", "codec", "config", "ratio", "model_bytes",
               "delta_bytes", "ra_ns", "decomp_gbps", "comp_gbps", "seed")


class RoundtripError(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    family: ModelFamily = ModelFamily.LINEAR
    partition_size: int = 1024
    tau: float = 0.1
    seed: int = 0
    reps: int = 3
    n_access: int | None = None  # defaults to the dataset size

    def label(self, codec_name: str) -> str:
        if codec_name in ("leco-fix", "leco-var"):
            part = f"L={self.partition_size}" if codec_name.endswith("fix") \
                else f"tau={self.tau}"
            return f"{self.family.name.lower()},{part}"
        if codec_name in ("for", "delta-fix"):
            return f"L={self.partition_size}"
        if codec_name == "delta-var":
            return f"tau={self.tau}"
        return "-"


@dataclass
class BenchRow:
    dataset: str
    codec: str
    config: str
    ratio: float
    model_bytes: int
    delta_bytes: int
    ra_ns: float
    decomp_gbps: float
    comp_gbps: float
    seed: int
    timestamp: float = field(default_factory=time.time)


def encode_with(codec_name: str, seq: IntSequence, config: BenchConfig):
    values = seq.values
    if codec_name == "leco-fix":
        layout = partition_fixed(values, config.partition_size)
        return codec.encode_column(seq, layout, config.family)
    if codec_name == "leco-var":
        cm = default_cost_model(config.family, PartitionScheme.VARIABLE,
                                config.tau)
        layout = partition_variable(values, config.family, cm)
        return codec.encode_column(seq, layout, config.family)
    if codec_name == "for":
        return baselines.for_encode(seq, frame_len=config.partition_size)
    if codec_name == "delta-fix":
        return baselines.delta_fix_encode(values, config.partition_size)
    if codec_name == "delta-var":
        cm = default_cost_model(ModelFamily.STEP, PartitionScheme.VARIABLE,
                                config.tau)
        return baselines.delta_var_encode(values, cm)
    if codec_name == "ef":
        return baselines.ef_encode(seq)
    raise ValueError(f"unknown codec: {codec_name}")


def decode_all_with(codec_name: str, col) -> np.ndarray:
    if codec_name == "for":
        return baselines.for_decode_all(col)
    if codec_name == "ef":
        return baselines.ef_decode_all(col)
    return codec.decode_all(col)


def access_fn(codec_name: str):
    if codec_name == "for":
        return baselines.for_decode_at
    if codec_name == "ef":
        return baselines.ef_access
    return codec.decode_at


def _bench_one(name: str, seq: IntSequence, codec_name: str,
               config: BenchConfig) -> BenchRow:
    raw_bytes = seq.raw_bytes()
    col = encode_with(codec_name, seq, config)

    # Hard gate before any timing.
    decoded = decode_all_with(codec_name, col)
    if decoded.size != seq.n or not np.array_equal(decoded, seq.values):
        bad = int(np.nonzero(decoded[:seq.n] != seq.values[:decoded.size])[0][0]) \
            if decoded.size == seq.n else -1
        raise RoundtripError(
            f"roundtrip mismatch for {codec_name} on {name}: first differing "
            f"index {bad}, got {decoded[bad] if bad >= 0 else 'n/a'}, "
            f"want {seq.values[bad] if bad >= 0 else 'n/a'}")

    rng = np.random.default_rng(config.seed)
    n_access = config.n_access or seq.n
    indices = rng.integers(0, seq.n, size=n_access)
    at = access_fn(codec_name)

    ra, dec, enc = [], [], []
    for _ in range(config.reps):
        t0 = time.perf_counter()
        encode_with(codec_name, seq, config)
        enc.append(time.perf_counter() - t0)

        t0 = time.perf_counter()
        for i in indices:
            at(col, int(i))
        ra.append((time.perf_counter() - t0) / n_access)

        t0 = time.perf_counter()
        decode_all_with(codec_name, col)
        dec.append(time.perf_counter() - t0)

    model_bytes, delta_bytes = col.model_delta_breakdown()
    return BenchRow(
        dataset=name,
        codec=codec_name,
        config=config.label(codec_name),
        ratio=col.size_bytes() / raw_bytes,
        model_bytes=model_bytes,
        delta_bytes=delta_bytes,
        ra_ns=float(np.mean(ra)) * 1e9,
        decomp_gbps=raw_bytes / float(np.mean(dec)) / 1e9,
        comp_gbps=raw_bytes / float(np.mean(enc)) / 1e9,
        seed=config.seed,
    )


def run_bench(datasets: dict[str, IntSequence], codecs=CODECS,
              config: BenchConfig | None = None) -> list[BenchRow]:
    config = config or BenchConfig()
    rows = []
    for name, seq in datasets.items():
        if not isinstance(seq, IntSequence):
            seq = IntSequence(np.asarray(seq, np.int64))
        for codec_name in codecs:
            if codec_name == "ef" and np.any(np.diff(seq.values) < 0):
                continue  # Elias-Fano needs sorted input
            rows.append(_bench_one(name, seq, codec_name, config))
    return rows


def report_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        d = asdict(r)
        writer.writerow([d[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def report_json(rows: list[BenchRow]) -> str:
    return json.dumps([{c: asdict(r)[c] for c in CSV_COLUMNS} for r in rows],
                      indent=2)
