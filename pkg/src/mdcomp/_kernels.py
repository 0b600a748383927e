"""Numba kernels for the hot paths.

Everything here is an implementation detail; the public modules wrap these
with validated, documented APIs. The linear minimax fit is the narrowest
enclosing band over the upper/lower convex hulls of (i, v_i): the band
half-width as a function of slope t is convex piecewise-linear with
breakpoints at hull edge slopes, so the optimum is found by sweeping the
merged breakpoint list once.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

INT64_MAX = np.iinfo(np.int64).max
INT64_MIN = np.iinfo(np.int64).min


@njit(cache=True)
def _bits_for_range(lo, hi):
    if lo == 0 and hi == 0:
        return 0
    need_pos = 1
    if hi > 0:
        x = hi
        b = 0
        while x > 0:
            x >>= 1
            b += 1
        need_pos = b + 1
    need_neg = 1
    if lo < 0:
        y = -lo - 1
        b = 0
        while y > 0:
            y >>= 1
            b += 1
        need_neg = b + 1
    return max(need_pos, need_neg)


@njit(cache=True)
def _bits_unsigned(x):
    b = 0
    while x > 0:
        x >>= 1
        b += 1
    return b


@njit(cache=True)
def _push_upper(ux, uy, pu, x, v):
    while pu >= 2 and (ux[pu - 1] - ux[pu - 2]) * (v - uy[pu - 2]) - (
        uy[pu - 1] - uy[pu - 2]
    ) * (x - ux[pu - 2]) >= 0.0:
        pu -= 1
    ux[pu] = x
    uy[pu] = v
    return pu + 1


@njit(cache=True)
def _push_lower(lx, ly, pl, x, v):
    while pl >= 2 and (lx[pl - 1] - lx[pl - 2]) * (v - ly[pl - 2]) - (
        ly[pl - 1] - ly[pl - 2]
    ) * (x - lx[pl - 2]) <= 0.0:
        pl -= 1
    lx[pl] = x
    ly[pl] = v
    return pl + 1


@njit(cache=True)
def _band_sweep(ux, uy, pu, lx, ly, pl):
    """Minimize U(t) - L(t) over hull edge slopes; returns (theta0, theta1, E)."""
    if pu == 1 and pl == 1:
        return uy[0], 0.0, 0.0
    iu = pu - 1
    il = 0
    eu = pu - 2
    el = 0
    best_w = np.inf
    best_t = 0.0
    best_u = iu
    best_l = il
    while eu >= 0 or el <= pl - 2:
        if eu >= 0:
            su = (uy[eu + 1] - uy[eu]) / (ux[eu + 1] - ux[eu])
        else:
            su = np.inf
        if el <= pl - 2:
            sl = (ly[el + 1] - ly[el]) / (lx[el + 1] - lx[el])
        else:
            sl = np.inf
        t = su if su <= sl else sl
        while eu >= 0:
            s = (uy[eu + 1] - uy[eu]) / (ux[eu + 1] - ux[eu])
            if s <= t:
                iu = eu
                eu -= 1
            else:
                break
        while el <= pl - 2:
            s = (ly[el + 1] - ly[el]) / (lx[el + 1] - lx[el])
            if s <= t:
                il = el + 1
                el += 1
            else:
                break
        w = (uy[iu] - t * ux[iu]) - (ly[il] - t * lx[il])
        if w < best_w or (w == best_w and abs(t) < abs(best_t)):
            best_w = w
            best_t = t
            best_u = iu
            best_l = il
    t = best_t
    theta0 = ((uy[best_u] - t * ux[best_u]) + (ly[best_l] - t * lx[best_l])) / 2.0
    return theta0, t, best_w / 2.0


@njit(cache=True)
def linear_minimax(values):
    """Minimax linear fit of int64 values at positions 0..n-1.

    Returns (theta0, theta1, half_width).
    """
    n = values.shape[0]
    if n == 1:
        return float(values[0]), 0.0, 0.0
    ux = np.empty(n, np.float64)
    uy = np.empty(n, np.float64)
    lx = np.empty(n, np.float64)
    ly = np.empty(n, np.float64)
    pu = 0
    pl = 0
    for k in range(n):
        x = float(k)
        v = float(values[k])
        pu = _push_upper(ux, uy, pu, x, v)
        pl = _push_lower(lx, ly, pl, x, v)
    return _band_sweep(ux, uy, pu, lx, ly, pl)


@njit(cache=True)
def linear_residual_range(values, theta0, theta1):
    """(min, max) of v_i - floor(theta0 + theta1*i)."""
    lo = INT64_MAX
    hi = INT64_MIN
    for k in range(values.shape[0]):
        r = values[k] - np.int64(math.floor(theta0 + theta1 * k))
        if r < lo:
            lo = r
        if r > hi:
            hi = r
    return lo, hi


@njit(cache=True)
def linear_phi(values, theta0, theta1):
    lo, hi = linear_residual_range(values, theta0, theta1)
    return _bits_for_range(lo, hi)


@njit(cache=True)
def step_phi_range(values):
    """(min, max) over adjacent diffs; first value excluded."""
    lo = np.int64(0)
    hi = np.int64(0)
    for k in range(1, values.shape[0]):
        d = values[k] - values[k - 1]
        if d < lo:
            lo = d
        if d > hi:
            hi = d
    if values.shape[0] <= 1:
        return np.int64(0), np.int64(0)
    return lo, hi


@njit(cache=True)
def const_phi(values):
    mn = values[0]
    mx = values[0]
    for k in range(values.shape[0]):
        if values[k] < mn:
            mn = values[k]
        if values[k] > mx:
            mx = values[k]
    c = np.int64(math.floor((float(mn) + float(mx)) / 2.0))
    return _bits_for_range(mn - c, mx - c)


@njit(cache=True)
def grow_linear(values, start, init_len, limit, tau_sm):
    """Split-phase growth with the linear regressor.

    Starts from the partition [start, start+init_len) and extends rightward
    while the inclusion cost C = (len+1)*phi_new - len*phi_cur stays <= tau_sm.
    Returns the exclusive end of the grown partition. The residual rescan is
    skipped when the refit leaves theta unchanged (common on smooth data).
    """
    cap = limit - start
    ux = np.empty(cap, np.float64)
    uy = np.empty(cap, np.float64)
    lx = np.empty(cap, np.float64)
    ly = np.empty(cap, np.float64)
    pu = 0
    pl = 0
    for k in range(init_len):
        x = float(k)
        v = float(values[start + k])
        pu = _push_upper(ux, uy, pu, x, v)
        pl = _push_lower(lx, ly, pl, x, v)
    t0, t1, _ = _band_sweep(ux, uy, pu, lx, ly, pl)
    lo, hi = linear_residual_range(values[start:start + init_len], t0, t1)
    phi_cur = _bits_for_range(lo, hi)
    j = start + init_len
    while j < limit:
        x = float(j - start)
        v = float(values[j])
        pu = _push_upper(ux, uy, pu, x, v)
        pl = _push_lower(lx, ly, pl, x, v)
        n0, n1, _ = _band_sweep(ux, uy, pu, lx, ly, pl)
        if n0 == t0 and n1 == t1:
            r = values[j] - np.int64(math.floor(t0 + t1 * x))
            nlo = lo if r >= lo else r
            nhi = hi if r <= hi else r
        else:
            nlo, nhi = linear_residual_range(values[start:j + 1], n0, n1)
        phi_new = _bits_for_range(nlo, nhi)
        length = j - start
        cost = (length + 1) * phi_new - length * phi_cur
        if cost <= tau_sm:
            t0 = n0
            t1 = n1
            lo = nlo
            hi = nhi
            phi_cur = phi_new
            j += 1
        else:
            return j
    return limit


@njit(cache=True)
def grow_step(values, start, init_len, limit, tau_sm):
    """Split-phase growth for the implicit step model (delta encoding)."""
    lo = np.int64(0)
    hi = np.int64(0)
    for k in range(start + 1, start + init_len):
        d = values[k] - values[k - 1]
        if d < lo:
            lo = d
        if d > hi:
            hi = d
    phi_cur = _bits_for_range(lo, hi)
    j = start + init_len
    while j < limit:
        d = values[j] - values[j - 1]
        nlo = lo if d >= lo else d
        nhi = hi if d <= hi else d
        phi_new = _bits_for_range(nlo, nhi)
        length = j - start
        cost = (length + 1) * phi_new - length * phi_cur
        if cost <= tau_sm:
            lo = nlo
            hi = nhi
            phi_cur = phi_new
            j += 1
        else:
            return j
    return limit


@njit(cache=True)
def grow_const(values, start, init_len, limit, tau_sm):
    """Split-phase growth for the constant (mid-range) model."""
    mn = values[start]
    mx = values[start]
    for k in range(start, start + init_len):
        if values[k] < mn:
            mn = values[k]
        if values[k] > mx:
            mx = values[k]
    c = np.int64(math.floor((float(mn) + float(mx)) / 2.0))
    phi_cur = _bits_for_range(mn - c, mx - c)
    j = start + init_len
    while j < limit:
        nmn = mn if values[j] >= mn else values[j]
        nmx = mx if values[j] <= mx else values[j]
        c = np.int64(math.floor((float(nmn) + float(nmx)) / 2.0))
        phi_new = _bits_for_range(nmn - c, nmx - c)
        length = j - start
        cost = (length + 1) * phi_new - length * phi_cur
        if cost <= tau_sm:
            mn = nmn
            mx = nmx
            phi_cur = phi_new
            j += 1
        else:
            return j
    return limit


@njit(cache=True)
def linear_bits_table(values):
    """phi of the minimax linear fit for every slice [i, j); bits[i, j]."""
    n = values.shape[0]
    bits = np.zeros((n, n + 1), np.uint8)
    ux = np.empty(n, np.float64)
    uy = np.empty(n, np.float64)
    lx = np.empty(n, np.float64)
    ly = np.empty(n, np.float64)
    for i in range(n):
        pu = 0
        pl = 0
        t0 = float(values[i])
        t1 = 0.0
        lo = np.int64(0)
        hi = np.int64(0)
        for j in range(i, n):
            x = float(j - i)
            v = float(values[j])
            pu = _push_upper(ux, uy, pu, x, v)
            pl = _push_lower(lx, ly, pl, x, v)
            n0, n1, _ = _band_sweep(ux, uy, pu, lx, ly, pl)
            if n0 == t0 and n1 == t1:
                r = values[j] - np.int64(math.floor(t0 + t1 * x))
                if r < lo:
                    lo = r
                if r > hi:
                    hi = r
            else:
                t0 = n0
                t1 = n1
                lo, hi = linear_residual_range(values[i:j + 1], t0, t1)
            bits[i, j + 1] = _bits_for_range(lo, hi)
    return bits


@njit(cache=True)
def step_bits_table(values):
    n = values.shape[0]
    bits = np.zeros((n, n + 1), np.uint8)
    for i in range(n):
        lo = np.int64(0)
        hi = np.int64(0)
        for j in range(i, n):
            if j > i:
                d = values[j] - values[j - 1]
                if d < lo:
                    lo = d
                if d > hi:
                    hi = d
            bits[i, j + 1] = _bits_for_range(lo, hi)
    return bits


@njit(cache=True)
def const_bits_table(values):
    n = values.shape[0]
    bits = np.zeros((n, n + 1), np.uint8)
    for i in range(n):
        mn = values[i]
        mx = values[i]
        for j in range(i, n):
            if values[j] < mn:
                mn = values[j]
            if values[j] > mx:
                mx = values[j]
            c = np.int64(math.floor((float(mn) + float(mx)) / 2.0))
            bits[i, j + 1] = _bits_for_range(mn - c, mx - c)
    return bits


@njit(cache=True)
def dp_partition(bits, sm):
    """Suffix DP over the slice-bits table; globally minimal total size.

    Minimizes (cost, partition count) lexicographically; the reconstruction
    walks from the left picking the smallest feasible boundary, which yields
    the lexicographically smallest optimal boundary list.
    """
    n = bits.shape[0]
    INF = np.int64(1 << 60)
    cost = np.empty(n + 1, np.int64)
    parts = np.empty(n + 1, np.int64)
    cost[n] = 0
    parts[n] = 0
    for i in range(n - 1, -1, -1):
        bc = INF
        bp = INF
        for j in range(i + 1, n + 1):
            c = sm + (j - i) * np.int64(bits[i, j]) + cost[j]
            p = 1 + parts[j]
            if c < bc or (c == bc and p < bp):
                bc = c
                bp = p
        cost[i] = bc
        parts[i] = bp
    bounds = np.empty(n + 1, np.int64)
    bounds[0] = 0
    m = 0
    i = 0
    while i < n:
        for j in range(i + 1, n + 1):
            c = sm + (j - i) * np.int64(bits[i, j]) + cost[j]
            if c == cost[i] and 1 + parts[j] == parts[i]:
                m += 1
                bounds[m] = j
                i = j
                break
    return bounds[:m + 1], cost[0]


@njit(cache=True)
def accumulate_floors(theta0, theta1, count):
    """floor of the theta1-accumulated prediction at each position."""
    out = np.empty(count, np.int64)
    acc = theta0
    for k in range(count):
        out[k] = np.int64(math.floor(acc))
        acc += theta1
    return out


def warmup():
    """Force-compile the kernels on a tiny input (cache persists on disk)."""
    v = np.array([0, 3, 4, 9], dtype=np.int64)
    linear_minimax(v)
    linear_phi(v, -1.0, 3.0)
    step_phi_range(v)
    const_phi(v)
    grow_linear(v, 0, 3, 4, 16.0)
    grow_step(v, 0, 2, 4, 16.0)
    grow_const(v, 0, 1, 4, 16.0)
    dp_partition(linear_bits_table(v), 8)
    dp_partition(step_bits_table(v), 8)
    dp_partition(const_bits_table(v), 8)
    accumulate_floors(0.5, 0.1, 4)
