"""Shared domain types: value sequences, regression models, partition layouts.

Model evaluation and residual computation live here because both the fitting
code and the decoder must agree bit-exactly on them: the decoder reconstructs
``floor(F(i)) + delta_i``, so the encoder computes residuals against the same
floored prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Sequence

import numpy as np


class ContextRequiredError(ValueError):
    """Raised when a model family cannot be evaluated standalone (Step)."""


class ModelFamily(IntEnum):
    CONSTANT = 0
    LINEAR = 1
    POLY2 = 2
    POLY3 = 3
    STEP = 4       # implicit step model of delta encoding; header stores first value
    EXP = 5        # theta0 + theta1*i + theta2*exp(i/256)
    LOG = 6        # theta0 + theta1*i + theta2*log(i+1)
    CUSTOM = 7     # arbitrary in-memory basis; not container-serializable

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @property
    def min_fit_len(self) -> int:
        """Minimum partition length for the fit to be meaningful (3 for linear)."""
        if self is ModelFamily.STEP:
            return 2
        return self.arity + 1


_ARITY = {
    ModelFamily.CONSTANT: 1,
    ModelFamily.LINEAR: 2,
    ModelFamily.POLY2: 3,
    ModelFamily.POLY3: 4,
    ModelFamily.STEP: 0,
    ModelFamily.EXP: 3,
    ModelFamily.LOG: 3,
    ModelFamily.CUSTOM: -1,  # depends on the basis
}

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1


@dataclass(frozen=True)
class IntSequence:
    """Uncompressed signed integer sequence with declared element width."""

    values: np.ndarray
    elem_width: int = 64

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.int64)
        object.__setattr__(self, "values", arr)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("sequence must be one-dimensional and non-empty")
        if self.elem_width not in (32, 64):
            raise ValueError("elem_width must be 32 or 64")
        if self.elem_width == 32:
            if arr.min() < -(1 << 31) or arr.max() > (1 << 31) - 1:
                raise ValueError("values do not fit declared 32-bit width")

    @property
    def n(self) -> int:
        return int(self.values.size)

    def raw_bytes(self) -> int:
        return self.n * self.elem_width // 8


@dataclass(frozen=True)
class RegressionModel:
    """A model family plus its coefficient vector, evaluable at any position.

    For CUSTOM, ``basis`` holds (name, callable) pairs; callables map a float
    position array (or scalar) to basis values.
    """

    family: ModelFamily
    theta: tuple = ()
    first_value: int | None = None  # STEP only
    basis: tuple = ()               # CUSTOM only

    def __post_init__(self):
        theta = tuple(float(t) for t in self.theta)
        object.__setattr__(self, "theta", theta)
        if self.family is ModelFamily.CUSTOM:
            if len(theta) != len(self.basis):
                raise ValueError("theta length must match basis length")
        elif self.family is ModelFamily.STEP:
            if theta:
                raise ValueError("step model has no coefficients")
            if self.first_value is None:
                raise ValueError("step model requires first_value")
        elif len(theta) != self.family.arity:
            raise ValueError(
                f"{self.family.name} expects {self.family.arity} coefficients"
            )
        if any(not math.isfinite(t) for t in theta):
            raise ValueError("coefficients must be finite")


def basis_matrix(family: ModelFamily, positions, basis=()) -> np.ndarray:
    """Design matrix for the family's basis functions at the given positions."""
    i = np.asarray(positions, dtype=np.float64)
    if family is ModelFamily.CONSTANT:
        cols = [np.ones_like(i)]
    elif family is ModelFamily.LINEAR:
        cols = [np.ones_like(i), i]
    elif family is ModelFamily.POLY2:
        cols = [np.ones_like(i), i, i * i]
    elif family is ModelFamily.POLY3:
        cols = [np.ones_like(i), i, i * i, i * i * i]
    elif family is ModelFamily.EXP:
        cols = [np.ones_like(i), i, np.exp(i / 256.0)]
    elif family is ModelFamily.LOG:
        cols = [np.ones_like(i), i, np.log(i + 1.0)]
    elif family is ModelFamily.CUSTOM:
        cols = [np.asarray(fn(i), dtype=np.float64) for _, fn in basis]
    else:
        raise ContextRequiredError("step model has no standalone basis")
    return np.stack(cols, axis=-1)


def evaluate(model: RegressionModel, i) -> float | np.ndarray:
    """Model prediction F(i) = sum_j theta_j * M_j(i) as float64.

    ``i`` may be a scalar position or an array of positions. Step models have
    no standalone prediction (the prior value is the prediction) and raise
    ContextRequiredError.
    """
    if model.family is ModelFamily.STEP:
        raise ContextRequiredError("step model evaluation requires the prior value")
    scalar = np.isscalar(i)
    if model.family is ModelFamily.LINEAR:
        # Hot path; keep the exact expression order shared with the decoder.
        t0, t1 = model.theta
        out = t0 + t1 * np.asarray(i, dtype=np.float64)
    else:
        mat = basis_matrix(model.family, i, model.basis)
        out = mat @ np.asarray(model.theta, dtype=np.float64)
    return float(out) if scalar else out


def predict_floor(model: RegressionModel, i) -> int | np.ndarray:
    """floor(F(i)); the integer prediction both encoder and decoder use."""
    v = evaluate(model, i)
    if np.isscalar(i):
        return int(math.floor(v))
    return np.floor(v).astype(np.int64)


def residual(model: RegressionModel, seq, i: int) -> int:
    """delta_i = v_i - floor(F(i)); matches the decoder exactly."""
    values = seq.values if isinstance(seq, IntSequence) else np.asarray(seq)
    return int(values[i]) - predict_floor(model, i)


def residuals_array(model: RegressionModel, values: np.ndarray) -> np.ndarray:
    """Vectorized residuals for one partition (positions 0..len-1)."""
    values = np.asarray(values, dtype=np.int64)
    if model.family is ModelFamily.STEP:
        out = np.empty(values.size, dtype=np.int64)
        out[0] = 0
        out[1:] = np.diff(values)
        return out
    preds = predict_floor(model, np.arange(values.size))
    return values - preds


def required_bits(residuals: Sequence[int]) -> int:
    """Smallest phi such that every residual fits [-2^(phi-1), 2^(phi-1)).

    phi == 0 means all residuals are exactly zero.
    """
    arr = np.asarray(residuals, dtype=np.int64)
    if arr.size == 0:
        return 0
    lo = int(arr.min())
    hi = int(arr.max())
    return bits_for_range(lo, hi)


def bits_for_range(lo: int, hi: int) -> int:
    """phi covering the closed signed range [lo, hi] in offset-binary."""
    if lo == 0 and hi == 0:
        return 0
    need_pos = hi.bit_length() + 1 if hi > 0 else 1
    need_neg = (-lo - 1).bit_length() + 1 if lo < 0 else 1
    return max(need_pos, need_neg)


@dataclass(frozen=True)
class ResidualSpec:
    """Bit width and representation of one partition's packed residuals."""

    bit_width: int
    representation: str = "offset_binary"  # step partitions use "zigzag"

    def __post_init__(self):
        if not 0 <= self.bit_width <= 64:
            raise ValueError("bit_width out of range")
        if self.representation not in ("offset_binary", "zigzag"):
            raise ValueError("unknown residual representation")


class PartitionScheme(IntEnum):
    FIXED = 0
    VARIABLE = 1


@dataclass(frozen=True)
class PartitionLayout:
    """Ordered non-overlapping boundaries k_0 = 0 < k_1 < ... < k_m = n."""

    boundaries: tuple
    scheme: PartitionScheme = PartitionScheme.VARIABLE
    fixed_len: int | None = None

    def __post_init__(self):
        bounds = tuple(int(b) for b in self.boundaries)
        object.__setattr__(self, "boundaries", bounds)
        if len(bounds) < 2 or bounds[0] != 0:
            raise ValueError("boundaries must start at 0 and contain at least one partition")
        if any(b >= c for b, c in zip(bounds, bounds[1:])):
            raise ValueError("boundaries must be strictly increasing")
        if self.scheme is PartitionScheme.FIXED:
            L = self.fixed_len
            if L is None or L < 1:
                raise ValueError("fixed scheme requires fixed_len >= 1")
            lens = [c - b for b, c in zip(bounds, bounds[1:])]
            if any(l != L for l in lens[:-1]) or lens[-1] > L:
                raise ValueError("fixed scheme partitions must have length fixed_len")

    @property
    def n(self) -> int:
        return self.boundaries[-1]

    @property
    def m(self) -> int:
        return len(self.boundaries) - 1

    def partitions(self):
        return list(zip(self.boundaries, self.boundaries[1:]))


def zigzag_encode(arr: np.ndarray) -> np.ndarray:
    """Signed -> unsigned bijection 0,-1,1,-2,... -> 0,1,2,3,..."""
    a = np.asarray(arr, dtype=np.int64)
    return ((a << 1) ^ (a >> 63)).astype(np.uint64)


def zigzag_decode(arr: np.ndarray) -> np.ndarray:
    a = np.asarray(arr, dtype=np.uint64)
    return ((a >> np.uint64(1)).astype(np.int64)) ^ -((a & np.uint64(1)).astype(np.int64))
