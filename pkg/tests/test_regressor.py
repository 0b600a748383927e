import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from mdcomp.core import ModelFamily, residuals_array
from mdcomp.regressor import (
    SingularBasisError,
    TooShortError,
    UnderdeterminedError,
    approx_linear_bits,
    fit_constant_minimax,
    fit_custom_basis_minimax,
    fit_family,
    fit_linear_minimax,
    fit_named_basis_minimax,
    fit_poly_minimax,
    fit_step,
    max_residual_bits,
)


def lp_band_oracle(values):
    """Independent minimax-line oracle: min E s.t. |t0 + t1*i - v_i| <= E."""
    n = len(values)
    i = np.arange(n, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    scale = max(1.0, np.abs(v).max())
    a_ub = np.block([
        [np.ones((n, 1)), i[:, None], -np.ones((n, 1))],
        [-np.ones((n, 1)), -i[:, None], -np.ones((n, 1))],
    ])
    b_ub = np.concatenate([v, -v]) / scale
    res = linprog([0, 0, 1], A_ub=a_ub, b_ub=b_ub,
                  bounds=[(None, None), (None, None), (0, None)],
                  method="highs")
    assert res.success
    return res.x[2] * scale


def test_worked_example():
    fit = fit_linear_minimax([0, 3, 4, 9])
    assert fit.model.theta == (-1.0, 3.0)
    assert fit.max_abs_residual == 1.0
    assert fit.phi == 2
    res = residuals_array(fit.model, np.array([0, 3, 4, 9], dtype=np.int64))
    assert res.tolist() == [1, 1, -1, 1]


def test_linear_matches_lp_oracle_random():
    rng = np.random.default_rng(42)
    for _ in range(300):
        n = int(rng.integers(2, 64))
        values = rng.integers(-10**6, 10**6, size=n)
        fit = fit_linear_minimax(values)
        oracle = lp_band_oracle(values)
        assert fit.max_abs_residual <= oracle * (1 + 1e-9) + 1e-9


def test_constant_midrange():
    fit = fit_constant_minimax([2, 8, 5])
    assert fit.model.theta == (5.0,)
    assert fit.max_abs_residual == 3.0


def test_constant_extreme_magnitudes():
    # int64 extremes must not overflow the midrange computation
    fit = fit_constant_minimax(np.array([-(2**62), 2**62], dtype=np.int64))
    assert fit.max_abs_residual == pytest.approx(2.0**62)


@given(st.lists(st.integers(-10**9, 10**9), min_size=2, max_size=60))
def test_linear_never_worse_than_constant(values):
    lin = fit_linear_minimax(values)
    con = fit_constant_minimax(values)
    assert lin.max_abs_residual <= con.max_abs_residual + 1e-6
    assert lin.phi <= con.phi


@given(st.lists(st.integers(-10**8, 10**8), min_size=2, max_size=40),
       st.integers(-10**8, 10**8))
def test_linear_shift_equivariance(values, shift):
    base = fit_linear_minimax(values)
    moved = fit_linear_minimax([v + shift for v in values])
    assert moved.max_abs_residual == pytest.approx(base.max_abs_residual,
                                                   rel=1e-9, abs=1e-6)
    assert moved.model.theta[1] == pytest.approx(base.model.theta[1],
                                                 rel=1e-9, abs=1e-9)


def test_poly_fits_exact_squares():
    values = np.arange(20, dtype=np.int64) ** 2
    fit = fit_poly_minimax(values, 2)
    assert fit.phi == 0
    fit3 = fit_poly_minimax(np.arange(16, dtype=np.int64) ** 3, 3)
    assert fit3.phi == 0


def test_poly_underdetermined():
    with pytest.raises(UnderdeterminedError):
        fit_poly_minimax([1, 2], 2)
    with pytest.raises(UnderdeterminedError):
        fit_linear_minimax([5])


def test_step_fit():
    fit = fit_step(np.array([5, 7, 6, 6], dtype=np.int64))
    assert fit.model.first_value == 5
    # diffs [2,-1,0]; zigzag needs the magnitude-2 diff -> 3 bits
    assert fit.phi == 3


def test_named_basis_families():
    i = np.arange(64, dtype=np.float64)
    values = np.round(3.0 + 0.5 * i + 40.0 * np.exp(i / 256.0)).astype(np.int64)
    fit = fit_named_basis_minimax(values, ModelFamily.EXP)
    assert fit.max_abs_residual < 1.0
    logv = np.round(10.0 + 1000.0 * np.log(i + 1.0)).astype(np.int64)
    fit2 = fit_named_basis_minimax(logv, ModelFamily.LOG)
    assert fit2.max_abs_residual < 1.0


def test_custom_basis_singular():
    basis = [("one", lambda x: np.ones_like(x)),
             ("also_one", lambda x: np.ones_like(x))]
    with pytest.raises(SingularBasisError):
        fit_custom_basis_minimax([1, 2, 3, 4], basis)
    fit = fit_custom_basis_minimax([1, 2, 3, 4], basis, drop_singular=True)
    assert fit.model.theta[1] == 0.0


def test_max_residual_bits_short_slices():
    for fam in (ModelFamily.LINEAR, ModelFamily.POLY2, ModelFamily.POLY3):
        assert max_residual_bits(np.array([9], dtype=np.int64), fam) == 0
    assert max_residual_bits(np.array([3, 100], dtype=np.int64),
                             ModelFamily.LINEAR) == 0


def test_max_residual_bits_matches_fit():
    rng = np.random.default_rng(1)
    for fam in (ModelFamily.LINEAR, ModelFamily.CONSTANT, ModelFamily.STEP):
        for _ in range(50):
            values = rng.integers(-10**5, 10**5, size=int(rng.integers(3, 80)))
            assert max_residual_bits(values, fam) == fit_family(values, fam).phi


def test_approx_linear_bits():
    # adjacent diffs of [0,1,9] are [1,8]; spread 7
    assert approx_linear_bits([0, 1, 9]) == pytest.approx(math.log2(7))
    assert approx_linear_bits([0, 5, 10, 15]) == 0.0
    with pytest.raises(TooShortError):
        approx_linear_bits([1, 2])
