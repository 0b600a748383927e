import json

import numpy as np
import pytest
from click.testing import CliRunner

from mdcomp.bench import (
    CSV_COLUMNS,
    BenchConfig,
    RoundtripError,
    report_csv,
    report_json,
    run_bench,
)
from mdcomp.cli import main
from mdcomp.core import IntSequence
from mdcomp.datagen import DatasetFormatError, generate, load_dataset, \
    save_dataset


def test_generate_linear_clean():
    seq = generate("linear", 1000, seed=1, jitter=0, slope=3)
    d = np.diff(seq.values)
    assert (d == d[0]).all()


def test_generate_poisson_increasing():
    seq = generate("poisson", 500, seed=2)
    assert (np.diff(seq.values) > 0).all()


def test_generate_normal_sorted_and_deterministic():
    a = generate("normal", 1000, seed=3)
    b = generate("normal", 1000, seed=3)
    assert np.array_equal(a.values, b.values)
    assert (np.diff(a.values) >= 0).all()


def test_generate_unknown_kind():
    with pytest.raises(ValueError, match="unknown dataset kind"):
        generate("zipf", 10)


def test_dataset_file_roundtrip(tmp_path):
    seq = IntSequence(np.array([5, -2, 7], dtype=np.int64))
    for fmt in ("bin32", "bin64", "text"):
        p = tmp_path / f"d.{fmt}"
        save_dataset(seq, p, fmt)
        back = load_dataset(p, fmt)
        assert back.values.tolist() == [5, -2, 7]


def test_load_dataset_errors(tmp_path):
    p = tmp_path / "bad"
    p.write_bytes(b"")
    with pytest.raises(DatasetFormatError, match="empty"):
        load_dataset(p, "bin64")
    p.write_bytes(b"\x05\x00\x00\x00\x00\x00\x00\x00\x01\x02")
    with pytest.raises(DatasetFormatError, match="truncated"):
        load_dataset(p, "bin64")
    p.write_text("12\nnot-a-number\n")
    with pytest.raises(DatasetFormatError, match="parse"):
        load_dataset(p, "text")


def test_run_bench_rows_and_reports():
    seq = generate("linear", 4000, seed=5)
    config = BenchConfig(partition_size=256, n_access=200, reps=1)
    rows = run_bench({"lin": seq}, ("leco-fix", "for", "ef"), config)
    assert [r.codec for r in rows] == ["leco-fix", "for", "ef"]
    for r in rows:
        assert 0 < r.ratio < 1
        assert r.model_bytes + r.delta_bytes == pytest.approx(
            r.ratio * seq.raw_bytes(), abs=1)
    csv_text = report_csv(rows)
    assert csv_text.splitlines()[0] == ",".join(CSV_COLUMNS)
    parsed = json.loads(report_json(rows))
    assert len(parsed) == 3 and set(parsed[0]) == set(CSV_COLUMNS)


def test_bench_content_reproducible():
    seq = generate("normal", 3000, seed=6)
    config = BenchConfig(partition_size=128, n_access=50, reps=1)
    a = run_bench({"d": seq}, ("leco-var",), config)
    b = run_bench({"d": seq}, ("leco-var",), config)
    assert a[0].ratio == b[0].ratio
    assert a[0].model_bytes == b[0].model_bytes


def test_roundtrip_gate(monkeypatch):
    import mdcomp.bench as bench_mod

    seq = generate("linear", 100, seed=7)
    real = bench_mod.decode_all_with

    def corrupted(codec_name, col):
        out = real(codec_name, col).copy()
        out[3] += 1
        return out

    monkeypatch.setattr(bench_mod, "decode_all_with", corrupted)
    with pytest.raises(RoundtripError, match="index 3"):
        bench_mod.run_bench({"d": seq}, ("leco-fix",), BenchConfig(reps=1))


def test_cli_end_to_end(tmp_path):
    runner = CliRunner()
    data = tmp_path / "d.bin"
    comp = tmp_path / "d.leco"
    back = tmp_path / "back.bin"

    r = runner.invoke(main, ["gen", "--kind", "linear", "--n", "5000",
                             "--seed", "1", str(data)])
    assert r.exit_code == 0, r.output
    r = runner.invoke(main, ["compress", "--codec", "leco-var", str(data),
                             str(comp)])
    assert r.exit_code == 0, r.output
    r = runner.invoke(main, ["decompress", str(comp), str(back)])
    assert r.exit_code == 0, r.output
    assert data.read_bytes() == back.read_bytes()

    r = runner.invoke(main, ["access", str(comp), "0", "4999"])
    assert r.exit_code == 0
    values = load_dataset(data, "bin64").values
    lines = r.output.strip().splitlines()
    assert lines[0] == f"0\t{values[0]}"
    assert lines[1] == f"4999\t{values[4999]}"

    r = runner.invoke(main, ["advise", str(data)])
    assert r.exit_code == 0, r.output
    assert "family:" in r.output and "partitioning:" in r.output

    r = runner.invoke(main, ["bench", "--codec", "leco-fix", "--codec", "for",
                             "--n-access", "100", str(data)])
    assert r.exit_code == 0, r.output
    assert r.output.splitlines()[0] == ",".join(CSV_COLUMNS)


def test_cli_train_selector(tmp_path):
    runner = CliRunner()
    out = tmp_path / "selector.json"
    r = runner.invoke(main, ["train-selector", "--per-family", "60",
                             str(out)])
    assert r.exit_code == 0, r.output
    obj = json.loads(out.read_text())
    assert "selector" in obj and "hardness_thresholds" in obj
    assert obj["train_accuracy"] >= 0.90
