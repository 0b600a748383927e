"""Partition layouts: fixed-length search, variable-length split/merge greedy,
and a DP-optimal oracle for testing.

The variable-length greedy follows the init/split/merge structure: seed
partitions where the curvature metric is smallest, grow each rightward while
the inclusion cost stays under tau * S_M, then repeatedly merge adjacent
partitions whenever the combined container size is smaller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import (
    IntSequence,
    ModelFamily,
    PartitionLayout,
    PartitionScheme,
    bits_for_range,
)
from .regressor import max_residual_bits


class OracleSizeLimitError(ValueError):
    """DP oracle invoked beyond its size limit."""


@dataclass(frozen=True)
class PartitionCostModel:
    """Bits charged per partition header (S_M) and split aggressiveness (tau)."""

    model_size_bits: int
    tau: float = 0.1

    def __post_init__(self):
        if self.model_size_bits <= 0:
            raise ValueError("model_size_bits must be positive")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must be in [0, 1]")


def default_cost_model(family: ModelFamily,
                       scheme: PartitionScheme = PartitionScheme.VARIABLE,
                       tau: float = 0.1) -> PartitionCostModel:
    """Cost model whose S_M matches the container's per-partition overhead."""
    from .codec import partition_header_bits

    return PartitionCostModel(partition_header_bits(family, scheme), tau)


def _as_values(seq) -> np.ndarray:
    if isinstance(seq, IntSequence):
        return seq.values
    return np.ascontiguousarray(seq, dtype=np.int64)


def partition_size_bits(seq_slice, family: ModelFamily,
                        cost_model: PartitionCostModel) -> int:
    """S_M + len * Delta(slice): one partition's contribution to the total."""
    values = _as_values(seq_slice)
    if values.size == 0:
        raise ValueError("empty slice")
    return cost_model.model_size_bits + values.size * max_residual_bits(values, family)


def inclusion_cost(seq_slice, next_value: int, family: ModelFamily) -> int:
    """C = (len+1) * Delta(slice + next) - len * Delta(slice)."""
    values = _as_values(seq_slice)
    extended = np.append(values, np.int64(next_value))
    length = values.size
    return (length + 1) * max_residual_bits(extended, family) \
        - length * max_residual_bits(values, family)


def partition_fixed(seq, length: int) -> PartitionLayout:
    """Boundaries at multiples of ``length``; last partition may be shorter."""
    values = _as_values(seq)
    if length < 1:
        raise ValueError("partition length must be >= 1")
    n = values.size
    bounds = list(range(0, n, length)) + [n]
    return PartitionLayout(tuple(bounds), PartitionScheme.FIXED, fixed_len=length)


# ---------------------------------------------------------------------------
# Seed selection


def _poly_order(family: ModelFamily) -> int:
    return {ModelFamily.CONSTANT: 0, ModelFamily.LINEAR: 1,
            ModelFamily.POLY2: 2, ModelFamily.POLY3: 3}.get(family, 1)


def select_start_positions(seq, family: ModelFamily,
                           max_seeds: int | None = None) -> list[tuple[int, int]]:
    """Seed segments for the split phase, as (start, end) index pairs.

    Polynomial-type families seed where the (k+1)th-order deltas are smallest
    in magnitude (one seed per local minimum, capped at n//16); the step
    family seeds where the second-order bit-width deltas are minimal, ties
    broken by smaller required bits.
    """
    values = _as_values(seq)
    n = values.size
    width = max(family.min_fit_len, 1)
    if n < width + 1:
        return [(0, n)]
    if max_seeds is None:
        max_seeds = max(1, n // 16)

    if family is ModelFamily.STEP:
        diffs = np.diff(values)
        rb = np.array([bits_for_range(int(d), int(d)) for d in diffs])
        if rb.size < 2:
            return [(0, min(width, n))]
        metric = np.abs(np.diff(rb)).astype(np.float64)
        tie = rb[:-1].astype(np.float64)
        # seed window [k, k+2) covers diff k; metric index k compares diffs k,k+1
        order = metric + tie / (tie.max() + 1.0 if tie.max() > 0 else 1.0)
    else:
        k = _poly_order(family)
        d = values
        for _ in range(k + 1):
            if d.size < 2:
                break
            d = np.diff(d)
        if d.size == 0:
            return [(0, min(width, n))]
        order = np.abs(d).astype(np.float64)

    # Local minima of the metric (plateau edges included).
    m = order.size
    if m == 1:
        minima = [0]
    else:
        minima = [i for i in range(m)
                  if (i == 0 or order[i] <= order[i - 1])
                  and (i == m - 1 or order[i] <= order[i + 1])]
    minima.sort(key=lambda i: (order[i], i))
    seeds: list[tuple[int, int]] = []
    taken = np.zeros(n, dtype=bool)
    for i in minima:
        start = min(i, n - width)
        end = start + width
        if taken[start:end].any():
            continue
        taken[start:end] = True
        seeds.append((start, end))
        if len(seeds) >= max_seeds:
            break
    seeds.sort()
    return seeds if seeds else [(0, min(width, n))]


# ---------------------------------------------------------------------------
# Split / merge greedy


def _grow(values: np.ndarray, start: int, init_len: int, limit: int,
          tau_sm: float, family: ModelFamily) -> int:
    if start + init_len >= limit:
        return limit
    if family is ModelFamily.LINEAR:
        return int(_kernels.grow_linear(values, start, init_len, limit, tau_sm))
    if family is ModelFamily.STEP:
        return int(_kernels.grow_step(values, start, init_len, limit, tau_sm))
    if family is ModelFamily.CONSTANT:
        return int(_kernels.grow_const(values, start, init_len, limit, tau_sm))
    # Generic slow path for LP-backed families.
    phi_cur = max_residual_bits(values[start:start + init_len], family)
    j = start + init_len
    while j < limit:
        phi_new = max_residual_bits(values[start:j + 1], family)
        length = j - start
        if (length + 1) * phi_new - length * phi_cur <= tau_sm:
            phi_cur = phi_new
            j += 1
        else:
            return j
    return limit


def _sweep(values: np.ndarray, pos: int, limit: int, tau_sm: float,
           family: ModelFamily, init_len: int, bounds: list[int]) -> None:
    """Grow partitions left-to-right over [pos, limit), appending boundaries."""
    first = True
    while pos < limit:
        init = min(init_len if first else 1, limit - pos)
        end = _grow(values, pos, init, limit, tau_sm, family)
        bounds.append(end)
        pos = end
        first = False


def partition_variable(seq, family: ModelFamily,
                       cost_model: PartitionCostModel) -> PartitionLayout:
    """Greedy split/merge variable-length partitioning."""
    values = _as_values(seq)
    n = values.size
    tau_sm = cost_model.tau * cost_model.model_size_bits
    seeds = select_start_positions(values, family)

    bounds = [0]
    pos = 0
    for k, (s, e) in enumerate(seeds):
        if s < pos:
            continue  # a previous partition already grew past this seed
        if s > pos:
            _sweep(values, pos, s, tau_sm, family, 1, bounds)
        # The seeded partition itself grows until the inclusion cost fails,
        # possibly past later seeds; the stretch left before the next
        # surviving seed is swept with fresh single-point partitions.
        end = _grow(values, s, min(e - s, n - s), n, tau_sm, family)
        bounds.append(end)
        pos = end
    if pos < n:
        _sweep(values, pos, n, tau_sm, family, 1, bounds)

    bounds = _merge_phase(values, bounds, family, cost_model)
    return PartitionLayout(tuple(bounds), PartitionScheme.VARIABLE)


def _merge_phase(values: np.ndarray, bounds: list[int], family: ModelFamily,
                 cost_model: PartitionCostModel) -> list[int]:
    sizes = [partition_size_bits(values[a:b], family, cost_model)
             for a, b in zip(bounds, bounds[1:])]
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(sizes) - 1:
            a, b, c = bounds[i], bounds[i + 1], bounds[i + 2]
            merged = partition_size_bits(values[a:c], family, cost_model)
            if merged < sizes[i] + sizes[i + 1]:
                del bounds[i + 1]
                sizes[i:i + 2] = [merged]
                changed = True
            else:
                i += 1
    return bounds


# ---------------------------------------------------------------------------
# DP oracle


def _bits_table(values: np.ndarray, family: ModelFamily) -> np.ndarray:
    if family is ModelFamily.LINEAR:
        return _kernels.linear_bits_table(values)
    if family is ModelFamily.STEP:
        return _kernels.step_bits_table(values)
    if family is ModelFamily.CONSTANT:
        return _kernels.const_bits_table(values)
    n = values.size
    bits = np.zeros((n, n + 1), dtype=np.uint8)
    for i in range(n):
        for j in range(i + 1, n + 1):
            bits[i, j] = max_residual_bits(values[i:j], family)
    return bits


def dp_optimal_partition(seq, family: ModelFamily,
                         cost_model: PartitionCostModel,
                         size_limit: int = 4096) -> PartitionLayout:
    """Globally minimal layout by dynamic programming (testing oracle).

    Ties break toward fewer partitions, then the lexicographically smallest
    boundary list.
    """
    values = _as_values(seq)
    if values.size > size_limit:
        raise OracleSizeLimitError(f"oracle size limit is {size_limit}")
    bits = _bits_table(values, family)
    bounds, _ = _kernels.dp_partition(bits, np.int64(cost_model.model_size_bits))
    return PartitionLayout(tuple(int(b) for b in bounds), PartitionScheme.VARIABLE)


def total_size_bits(seq, layout: PartitionLayout, family: ModelFamily,
                    cost_model: PartitionCostModel) -> int:
    """Sum of partition_size_bits over a layout."""
    values = _as_values(seq)
    return sum(partition_size_bits(values[a:b], family, cost_model)
               for a, b in layout.partitions())


# ---------------------------------------------------------------------------
# Fixed-length search


def search_fixed_length(seq, family: ModelFamily, n_max: int = 10000,
                        sample_frac: float = 0.01, seed: int = 0,
                        tau: float = 0.1) -> int:
    """U-shape search for the best fixed partition length.

    Samples random subsequences (under ``sample_frac`` of the data), probes
    powers of two exponentially until past the ratio minimum, then refines
    backward with halving steps, stopping once the ratio decline between
    iterations falls under 0.01%.
    """
    values = _as_values(seq)
    n = values.size
    rng = np.random.default_rng(seed)
    if n <= n_max:
        samples = [values]
    else:
        budget = max(1, int(n * sample_frac) // n_max)
        starts = rng.integers(0, n - n_max + 1, size=budget)
        samples = [values[s:s + n_max] for s in sorted(starts)]
    cost_model = default_cost_model(family, PartitionScheme.FIXED, tau)
    max_len = min(n_max, max(len(s) for s in samples))

    cache: dict[int, float] = {}

    def ratio(length: int) -> float:
        if length not in cache:
            bits = 0
            raw = 0
            for s in samples:
                layout = partition_fixed(s, min(length, len(s)))
                bits += total_size_bits(s, layout, family, cost_model)
                raw += len(s) * 64
            cache[length] = bits / raw
        return cache[length]

    length = 1
    best = length
    while length <= max_len:
        if ratio(length) < ratio(best):
            best = length
        if ratio(length) > ratio(best):
            break  # past the minimum
        length *= 2
    step = max(best // 2, 1)
    prev = ratio(best)
    while step >= 1:
        for cand in (best - step, best + step):
            if 1 <= cand <= max_len and ratio(cand) < ratio(best):
                best = cand
        if prev - ratio(best) < 1e-4 * prev:
            break
        prev = ratio(best)
        step //= 2
    return best
