"""Command-line interface for compression, random access, benchmarking,
dataset generation, and advisor training."""

from __future__ import annotations

import json
import sys
from importlib import resources
from pathlib import Path

import click
import numpy as np

from . import advisor, baselines, bench, codec, datagen
from .core import IntSequence, ModelFamily, PartitionScheme
from .partitioner import default_cost_model, partition_fixed, partition_variable

_FAMILIES = {f.name.lower(): f for f in ModelFamily if f is not ModelFamily.CUSTOM}


def _load(path: str, fmt: str) -> IntSequence:
    return datagen.load_dataset(path, fmt)


def _default_selector() -> dict:
    text = resources.files("mdcomp").joinpath("data/selector.json").read_text()
    return json.loads(text)


@click.group()
def main():
    """Learned model+delta compression toolkit."""


@main.command()
@click.option("--kind", type=click.Choice(["linear", "normal", "poisson"]),
              required=True)
@click.option("--n", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--format", "fmt", type=click.Choice(["bin32", "bin64", "text"]),
              default="bin64")
@click.argument("output", type=click.Path())
def gen(kind, n, seed, fmt, output):
    """Generate a synthetic dataset file."""
    seq = datagen.generate(kind, n, seed)
    datagen.save_dataset(seq, output, fmt)
    click.echo(f"wrote {n} values to {output}")


@main.command()
@click.option("--codec", "codec_name", type=click.Choice(bench.CODECS),
              default="leco-var")
@click.option("--family", type=click.Choice(sorted(_FAMILIES)), default="linear")
@click.option("--partition-size", type=int, default=1024)
@click.option("--tau", type=float, default=0.1)
@click.option("--format", "fmt", type=click.Choice(["bin32", "bin64", "text"]),
              default="bin64")
@click.argument("input_path", type=click.Path(exists=True))
@click.argument("output", type=click.Path())
def compress(codec_name, family, partition_size, tau, fmt, input_path, output):
    """Compress a dataset file into a container."""
    seq = _load(input_path, fmt)
    config = bench.BenchConfig(family=_FAMILIES[family],
                               partition_size=partition_size, tau=tau)
    col = bench.encode_with(codec_name, seq, config)
    Path(output).write_bytes(col.to_bytes())
    click.echo(f"{seq.raw_bytes()} -> {col.size_bytes()} bytes "
               f"(ratio {col.size_bytes() / seq.raw_bytes():.4f})")


def _open_container(path: str):
    data = Path(path).read_bytes()
    if len(data) < 6 or data[:4] != codec.MAGIC:
        raise click.ClickException("not a recognized container")
    tag = data[5]
    if tag == baselines.TAG_FOR:
        return "for", baselines.ForColumn.from_bytes(data)
    if tag == baselines.TAG_ELIAS_FANO:
        return "ef", baselines.EliasFanoColumn.from_bytes(data)
    return "leco", codec.CompressedColumn.from_bytes(data)


@main.command()
@click.option("--format", "fmt", type=click.Choice(["bin32", "bin64", "text"]),
              default="bin64")
@click.argument("input_path", type=click.Path(exists=True))
@click.argument("output", type=click.Path())
def decompress(fmt, input_path, output):
    """Decode a container back into a dataset file."""
    kind, col = _open_container(input_path)
    values = bench.decode_all_with(kind, col)
    datagen.save_dataset(IntSequence(values), output, fmt)
    click.echo(f"decoded {values.size} values to {output}")


@main.command()
@click.argument("input_path", type=click.Path(exists=True))
@click.argument("indices", type=int, nargs=-1, required=True)
def access(input_path, indices):
    """Random-access individual positions of a container."""
    kind, col = _open_container(input_path)
    at = bench.access_fn(kind)
    for i in indices:
        click.echo(f"{i}\t{at(col, i)}")


@main.command("bench")
@click.option("--codec", "codec_names", type=click.Choice(bench.CODECS),
              multiple=True, default=bench.CODECS)
@click.option("--family", type=click.Choice(sorted(_FAMILIES)), default="linear")
@click.option("--partition-size", type=int, default=1024)
@click.option("--tau", type=float, default=0.1)
@click.option("--seed", type=int, default=0)
@click.option("--n-access", type=int, default=None,
              help="accesses per repetition (default: dataset size)")
@click.option("--format", "fmt", type=click.Choice(["bin32", "bin64", "text"]),
              default="bin64")
@click.option("--out", "out_fmt", type=click.Choice(["csv", "json"]),
              default="csv")
@click.argument("inputs", type=click.Path(exists=True), nargs=-1, required=True)
def bench_cmd(codec_names, family, partition_size, tau, seed, n_access, fmt,
              out_fmt, inputs):
    """Run the compression / access / decode benchmark on dataset files."""
    datasets = {Path(p).name: _load(p, fmt) for p in inputs}
    config = bench.BenchConfig(family=_FAMILIES[family],
                               partition_size=partition_size, tau=tau,
                               seed=seed, n_access=n_access)
    try:
        rows = bench.run_bench(datasets, codec_names, config)
    except bench.RoundtripError as e:
        click.echo(str(e), err=True)
        sys.exit(1)
    out = bench.report_csv(rows) if out_fmt == "csv" else bench.report_json(rows)
    click.echo(out, nl=False)


@main.command()
@click.option("--format", "fmt", type=click.Choice(["bin32", "bin64", "text"]),
              default="bin64")
@click.option("--selector", "selector_path", type=click.Path(exists=True),
              default=None, help="selector JSON (default: shipped model)")
@click.argument("input_path", type=click.Path(exists=True))
def advise(fmt, selector_path, input_path):
    """Recommend a model family and partitioning strategy for a dataset."""
    seq = _load(input_path, fmt)
    obj = json.loads(Path(selector_path).read_text()) if selector_path \
        else _default_selector()
    selector = advisor.SelectorModel.from_json(json.dumps(obj["selector"]))
    family = advisor.recommend_regressor(seq.values, selector)
    scores = advisor.hardness_scores(seq.values)
    scheme = advisor.advise_partitioning(scores,
                                         tuple(obj["hardness_thresholds"]))
    click.echo(f"family: {family.name.lower()}")
    click.echo(f"partitioning: {scheme.name.lower()} "
               f"(H_l={scores.local:.4f}, H_g={scores.global_:.4f})")


@main.command("train-selector")
@click.option("--seed", type=int, default=7)
@click.option("--per-family", type=int, default=120)
@click.argument("output", type=click.Path())
def train_selector_cmd(seed, per_family, output):
    """Train the family selector on synthetic corpora and save it as JSON."""
    from .selector_training import train_default_selector

    obj, accuracy = train_default_selector(seed=seed, per_family=per_family)
    Path(output).write_text(json.dumps(obj, indent=1))
    click.echo(f"training accuracy {accuracy:.3f}, wrote {output}")
