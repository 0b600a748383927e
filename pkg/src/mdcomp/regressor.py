"""Minimax (l-infinity) model fitting per partition.

The fitting objective is the residual bit-width: minimize the maximum
absolute prediction error, because the packed delta array spends a fixed
phi bits on every value. The linear family is solved exactly with the
narrowest-enclosing-band convex hull method; higher-order and custom bases
go through an exact small-dimension LP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from . import _kernels
from .core import (
    IntSequence,
    ModelFamily,
    RegressionModel,
    basis_matrix,
    required_bits,
    residuals_array,
)


class UnderdeterminedError(ValueError):
    """Fewer points than model coefficients."""


class SingularBasisError(ValueError):
    """Basis matrix is rank-deficient on the given positions."""


class TooShortError(ValueError):
    """Sequence too short for the requested statistic."""


@dataclass(frozen=True)
class FitResult:
    model: RegressionModel
    phi: int
    max_abs_residual: float


def _as_values(seq) -> np.ndarray:
    if isinstance(seq, IntSequence):
        return seq.values
    return np.ascontiguousarray(seq, dtype=np.int64)


def _finish(model: RegressionModel, values: np.ndarray, max_abs: float) -> FitResult:
    phi = required_bits(residuals_array(model, values))
    return FitResult(model=model, phi=phi, max_abs_residual=float(max_abs))


def fit_constant_minimax(seq) -> FitResult:
    """Mid-range constant: theta0 = (max+min)/2, half-width (max-min)/2."""
    values = _as_values(seq)
    mn = float(values.min())
    mx = float(values.max())
    model = RegressionModel(ModelFamily.CONSTANT, ((mn + mx) / 2.0,))
    return _finish(model, values, (mx - mn) / 2.0)


def fit_linear_minimax(seq) -> FitResult:
    """Exact minimax line via the narrowest enclosing band over convex hulls."""
    values = _as_values(seq)
    if values.size < 2:
        raise UnderdeterminedError("linear fit needs at least 2 points")
    t0, t1, half = _kernels.linear_minimax(values)
    model = RegressionModel(ModelFamily.LINEAR, (t0, t1))
    return _finish(model, values, half)


def _lp_minimax(mat: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, float]:
    """Solve min E s.t. |mat @ theta - v| <= E as an LP (exact, small dims)."""
    n, p = mat.shape
    v = values.astype(np.float64)
    # Scale the target so the solver sees O(1) magnitudes; the minimax fit
    # is equivariant under scaling, so coefficients map straight back.
    scale = max(1.0, float(np.abs(v).max()))
    v_s = v / scale
    c = np.zeros(p + 1)
    c[-1] = 1.0
    ones = np.ones((n, 1))
    a_ub = np.block([[mat, -ones], [-mat, -ones]])
    b_ub = np.concatenate([v_s, -v_s])
    res = linprog(c, A_ub=a_ub, b_ub=b_ub,
                  bounds=[(None, None)] * p + [(0, None)], method="highs")
    if not res.success:
        raise SingularBasisError(f"minimax LP failed: {res.message}")
    return res.x[:p] * scale, float(res.x[p]) * scale


def _snap_integer_theta(family: ModelFamily, values: np.ndarray, theta,
                        half: float, basis=()) -> tuple[tuple, float]:
    """Round coefficients to integers when that does not worsen the band.

    LP solutions on exactly-representable data (e.g. pure polynomials) land
    within float error of integer coefficients; snapping makes the floored
    predictions exact so phi drops to 0.
    """
    mat = basis_matrix(family, np.arange(values.size), basis)
    cand = np.round(np.asarray(theta, dtype=np.float64))
    res = values - mat @ cand
    worst = float(np.abs(res).max()) if res.size else 0.0
    if worst <= half + 1e-9:
        return tuple(cand), worst
    return tuple(theta), half


def fit_poly_minimax(seq, degree: int) -> FitResult:
    """Minimax polynomial of degree 2 or 3 (positions scaled for conditioning)."""
    if degree not in (2, 3):
        raise ValueError("degree must be 2 or 3")
    values = _as_values(seq)
    n = values.size
    if n <= degree:
        raise UnderdeterminedError("underdetermined: need n > degree points")
    family = ModelFamily.POLY2 if degree == 2 else ModelFamily.POLY3
    scale = float(max(n - 1, 1))
    u = np.arange(n, dtype=np.float64) / scale
    mat = np.stack([u ** k for k in range(degree + 1)], axis=1)
    coef, half = _lp_minimax(mat, values)
    theta = tuple(coef[k] / scale ** k for k in range(degree + 1))
    theta, half = _snap_integer_theta(family, values, theta, half)
    model = RegressionModel(family, theta)
    return _finish(model, values, half)


def fit_custom_basis_minimax(seq, basis, drop_singular: bool = False) -> FitResult:
    """Minimax weights over arbitrary named basis functions.

    ``basis`` is a list of (name, callable) pairs; callables take a float64
    position array. A rank-deficient basis raises SingularBasisError unless
    ``drop_singular`` is set, in which case dependent terms are dropped
    (weight 0) before solving.
    """
    values = _as_values(seq)
    basis = tuple((name, fn) for name, fn in basis)
    if values.size < len(basis):
        raise UnderdeterminedError("more basis terms than points")
    mat = basis_matrix(ModelFamily.CUSTOM, np.arange(values.size), basis)
    if not np.all(np.isfinite(mat)):
        raise SingularBasisError("basis function not finite on [0, n)")
    keep = list(range(len(basis)))
    if np.linalg.matrix_rank(mat) < len(basis):
        if not drop_singular:
            raise SingularBasisError("singular basis")
        # Greedy column selection: keep each column only if it raises the rank.
        keep = []
        for j in range(len(basis)):
            cand = keep + [j]
            if np.linalg.matrix_rank(mat[:, cand]) == len(cand):
                keep = cand
    coef, half = _lp_minimax(mat[:, keep], values)
    theta = np.zeros(len(basis))
    theta[keep] = coef
    snapped, half = _snap_integer_theta(ModelFamily.CUSTOM, values, theta,
                                        half, basis=basis)
    model = RegressionModel(ModelFamily.CUSTOM, snapped, basis=basis)
    return _finish(model, values, half)


def fit_named_basis_minimax(seq, family: ModelFamily) -> FitResult:
    """Minimax fit for the serializable EXP/LOG basis families."""
    values = _as_values(seq)
    arity = family.arity
    if values.size < arity:
        raise UnderdeterminedError("more basis terms than points")
    mat = basis_matrix(family, np.arange(values.size))
    coef, half = _lp_minimax(mat, values)
    theta, half = _snap_integer_theta(family, values, tuple(coef), half)
    model = RegressionModel(family, theta)
    return _finish(model, values, half)


def fit_step(seq) -> FitResult:
    """Implicit step model: first value is the model, diffs are the deltas."""
    values = _as_values(seq)
    model = RegressionModel(ModelFamily.STEP, (), first_value=int(values[0]))
    res = residuals_array(model, values)
    max_abs = float(np.abs(res).max()) if res.size else 0.0
    return FitResult(model=model, phi=required_bits(res), max_abs_residual=max_abs)


def fit_family(seq, family: ModelFamily, degree: int | None = None) -> FitResult:
    """Dispatch to the family's minimax fit."""
    values = _as_values(seq)
    if family is ModelFamily.CONSTANT:
        return fit_constant_minimax(values)
    if family is ModelFamily.LINEAR:
        if values.size == 1:
            # A single point is fit exactly by a flat line.
            model = RegressionModel(ModelFamily.LINEAR, (float(values[0]), 0.0))
            return _finish(model, values, 0.0)
        return fit_linear_minimax(values)
    if family is ModelFamily.POLY2:
        return fit_poly_minimax(values, 2)
    if family is ModelFamily.POLY3:
        return fit_poly_minimax(values, 3)
    if family is ModelFamily.STEP:
        return fit_step(values)
    if family in (ModelFamily.EXP, ModelFamily.LOG):
        return fit_named_basis_minimax(values, family)
    raise ValueError(f"cannot fit family {family}")


def max_residual_bits(seq, family: ModelFamily) -> int:
    """Delta(v): bits needed for the worst residual of the family's best fit.

    For small slices that the family fits exactly (length <= coefficient
    count) this is 0 by definition.
    """
    values = _as_values(seq)
    if family is ModelFamily.STEP:
        lo, hi = _kernels.step_phi_range(values)
        return _kernels._bits_for_range(int(lo), int(hi))
    if family is ModelFamily.CONSTANT:
        return int(_kernels.const_phi(values))
    if family is ModelFamily.LINEAR:
        if values.size <= 2:
            return 0
        t0, t1, _ = _kernels.linear_minimax(values)
        return int(_kernels.linear_phi(values, t0, t1))
    if values.size <= family.arity:
        return 0
    return fit_family(values, family).phi


def approx_linear_bits(seq) -> float:
    """log2 spread of adjacent diffs; cheap proxy for the linear fit hardness."""
    values = _as_values(seq)
    if values.size < 3:
        raise TooShortError("need at least 3 points")
    d = np.diff(values)
    spread = int(d.max()) - int(d.min())
    if spread <= 1:
        return 0.0
    return math.log2(spread)
