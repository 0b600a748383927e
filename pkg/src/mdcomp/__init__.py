"""Lossless model+delta compression for integer and string columns.

Each partition stores a small regression model plus bit-packed prediction
residuals at a fixed width; partition boundaries are chosen greedily to
trade model overhead against residual bits. Baselines (FOR, Delta,
Elias-Fano), an advisor for picking model families and partitioning, and a
benchmark CLI round out the package.
"""

from .advisor import (
    FeatureVector,
    HardnessScores,
    SelectorModel,
    advise_partitioning,
    extract_features,
    hardness_scores,
    pla_segments,
    recommend_regressor,
    train_selector,
)
from .codec import (
    CompressedColumn,
    FilterStats,
    decode_all,
    decode_at,
    decode_positions,
    decode_range,
    encode_column,
    filter_less_than,
)
from .core import (
    IntSequence,
    ModelFamily,
    PartitionLayout,
    PartitionScheme,
    RegressionModel,
)
from .partitioner import (
    PartitionCostModel,
    default_cost_model,
    dp_optimal_partition,
    partition_fixed,
    partition_variable,
    search_fixed_length,
)
from .regressor import (
    FitResult,
    fit_constant_minimax,
    fit_family,
    fit_linear_minimax,
    fit_poly_minimax,
    fit_step,
)
from .strings import (
    StringColumn,
    decode_all_strings,
    decode_string_at,
    encode_string_partition,
    map_string_to_int,
)

__version__ = "0.1.0"
