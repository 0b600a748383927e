#!/usr/bin/env python3
"""End-to-end benchmark over synthetic datasets and all codecs.

Writes bench_results.csv and bench_results.json next to this script.
Usage: python scripts/run_benchmarks.py [--n 1000000] [--seed 0]
"""

import argparse
from pathlib import Path

from mdcomp import _kernels
from mdcomp.bench import BenchConfig, CODECS, report_csv, report_json, run_bench
from mdcomp.datagen import generate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-access", type=int, default=10_000,
                    help="sampled accesses per repetition")
    args = ap.parse_args()

    _kernels.warmup()
    datasets = {
        "linear": generate("linear", args.n, seed=args.seed),
        "normal": generate("normal", args.n, seed=args.seed),
        "poisson": generate("poisson", args.n, seed=args.seed),
    }
    config = BenchConfig(seed=args.seed, n_access=args.n_access)
    rows = run_bench(datasets, CODECS, config)

    out = Path(__file__).resolve().parent
    (out / "bench_results.csv").write_text(report_csv(rows))
    (out / "bench_results.json").write_text(report_json(rows))
    for r in rows:
        print(f"{r.dataset:8s} {r.codec:10s} ratio={r.ratio:.4f} "
              f"ra={r.ra_ns:8.0f}ns decomp={r.decomp_gbps:.2f}GB/s")


if __name__ == "__main__":
    main()
