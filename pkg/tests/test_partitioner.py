import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mdcomp.core import ModelFamily, PartitionScheme
from mdcomp.partitioner import (
    OracleSizeLimitError,
    PartitionCostModel,
    default_cost_model,
    dp_optimal_partition,
    inclusion_cost,
    partition_fixed,
    partition_size_bits,
    partition_variable,
    search_fixed_length,
    select_start_positions,
    total_size_bits,
)
from mdcomp.regressor import max_residual_bits


def test_partition_fixed_boundaries():
    layout = partition_fixed(np.arange(10), 4)
    assert layout.boundaries == (0, 4, 8, 10)
    assert layout.fixed_len == 4
    with pytest.raises(ValueError):
        partition_fixed(np.arange(10), 0)


def test_step_inclusion_example():
    # growing [30,31,32] by 29: diffs widen from [1,1] (2 bits) to
    # [1,1,-3] (3 bits), so C = 4*3 - 3*2 = 6
    assert inclusion_cost([30, 31, 32], 29, ModelFamily.STEP) == 6
    cm = PartitionCostModel(32, tau=0.5)
    assert cm.tau * cm.model_size_bits == 16  # 6 <= 16: inclusion accepted


def test_step_merge_example():
    # merging {30,31,32,29} with {49} is cheaper than keeping them apart
    cm = PartitionCostModel(32, tau=0.5)
    left = partition_size_bits([30, 31, 32, 29], ModelFamily.STEP, cm)
    right = partition_size_bits([49], ModelFamily.STEP, cm)
    merged = partition_size_bits([30, 31, 32, 29, 49], ModelFamily.STEP, cm)
    assert merged < left + right
    layout = partition_variable(np.array([30, 31, 32, 29, 49]),
                                ModelFamily.STEP, cm)
    assert layout.m == 1


def test_cost_model_validation():
    with pytest.raises(ValueError):
        PartitionCostModel(0)
    with pytest.raises(ValueError):
        PartitionCostModel(32, tau=1.5)


def brute_force_optimum(values, family, cost_model):
    """Enumerate every layout of a tiny sequence."""
    n = len(values)
    best = None
    for r in range(n):
        for cuts in itertools.combinations(range(1, n), r):
            bounds = (0,) + cuts + (n,)
            cost = sum(partition_size_bits(values[a:b], family, cost_model)
                       for a, b in zip(bounds, bounds[1:]))
            key = (cost, len(bounds), bounds)
            if best is None or key < best:
                best = key
    return best


@pytest.mark.parametrize("family", [ModelFamily.LINEAR, ModelFamily.STEP,
                                    ModelFamily.CONSTANT])
def test_dp_matches_enumeration(family):
    rng = np.random.default_rng(7)
    cm = PartitionCostModel(64)
    for _ in range(25):
        values = rng.integers(-1000, 1000, size=8)
        layout = dp_optimal_partition(values, family, cm)
        cost = total_size_bits(values, layout, family, cm)
        opt_cost, _, opt_bounds = brute_force_optimum(values, family, cm)
        assert cost == opt_cost
        assert layout.boundaries == opt_bounds  # lexicographically smallest optimum


def test_dp_size_limit():
    cm = PartitionCostModel(64)
    with pytest.raises(OracleSizeLimitError):
        dp_optimal_partition(np.arange(5000), ModelFamily.LINEAR, cm,
                             size_limit=4096)


def test_variable_layout_covers_sequence():
    rng = np.random.default_rng(3)
    cm = default_cost_model(ModelFamily.LINEAR)
    for _ in range(30):
        n = int(rng.integers(1, 600))
        values = np.cumsum(rng.integers(-30, 31, size=n))
        layout = partition_variable(values, ModelFamily.LINEAR, cm)
        assert layout.boundaries[0] == 0 and layout.boundaries[-1] == n
        assert layout.scheme is PartitionScheme.VARIABLE


def test_variable_splits_on_regime_change():
    a = np.arange(200) * 3
    b = np.arange(150) * 3 + 10**7
    values = np.concatenate([a, b])
    cm = default_cost_model(ModelFamily.LINEAR)
    layout = partition_variable(values, ModelFamily.LINEAR, cm)
    assert 200 in layout.boundaries
    # and it should handily beat a single partition
    one = total_size_bits(values, partition_fixed(values, 350),
                          ModelFamily.LINEAR, cm)
    assert total_size_bits(values, layout, ModelFamily.LINEAR, cm) < one


def test_incremental_inclusion_cost_definition():
    rng = np.random.default_rng(11)
    for _ in range(40):
        values = rng.integers(-500, 500, size=int(rng.integers(2, 20)))
        nxt = int(rng.integers(-500, 500))
        length = values.size
        ext = np.append(values, nxt)
        expected = (length + 1) * max_residual_bits(ext, ModelFamily.LINEAR) \
            - length * max_residual_bits(values, ModelFamily.LINEAR)
        assert inclusion_cost(values, nxt, ModelFamily.LINEAR) == expected


def test_seed_selection_prefers_smooth_regions():
    rng = np.random.default_rng(5)
    smooth = np.arange(64) * 10
    rough = rng.integers(-10**6, 10**6, size=64)
    values = np.concatenate([rough, smooth])
    seeds = select_start_positions(values, ModelFamily.LINEAR)
    assert any(s >= 64 for s, _ in seeds)
    assert all(0 <= s < e <= values.size for s, e in seeds)


def test_search_fixed_length_finds_structure():
    # two interleaved regimes of period 64 make 64 a natural length
    rng = np.random.default_rng(9)
    blocks = []
    for j in range(64):
        base = int(rng.integers(0, 10**6))
        blocks.append(base + np.arange(64) * int(rng.integers(1, 5)))
    values = np.concatenate(blocks)
    best = search_fixed_length(values, ModelFamily.LINEAR)
    cm = default_cost_model(ModelFamily.LINEAR, PartitionScheme.FIXED)
    r_best = total_size_bits(values, partition_fixed(values, best),
                             ModelFamily.LINEAR, cm)
    r_4096 = total_size_bits(values, partition_fixed(values, 4096),
                             ModelFamily.LINEAR, cm)
    assert r_best <= r_4096
