"""Compiled inner loops for the Monte Carlo experiments.

These mirror ``boundary.advance_boundary`` and the SJ dynamic program but
work on flat arrays.  Every sign lookup goes through ``xi_at`` so the same
override box / fill hooks as ``SignField`` apply.  Batched entry points are
parallel over samples; each sample writes only its own output slot, so the
results do not depend on the thread count.
"""

import numba
import numpy as np

from ._rng import bit, sign_bit

NO_BOX = np.zeros((0, 0), dtype=np.int8)
UNREACHED = -1


@numba.njit(cache=True, inline="always")
def xi_at(key, box, i0, n0, fill, i, n):
    a = i - i0
    b = n - n0
    if 0 <= a < box.shape[0] and 0 <= b < box.shape[1]:
        s = box[a, b]
        if s != 0:
            return np.int64(s)
    if fill != 0:
        return np.int64(fill)
    return np.int64(sign_bit(key, i, n))


@numba.njit(cache=True)
def dual_walk(key, box, i0, n0, fill, j, start, t_lo, out):
    """Backward walk from (j, start) down to t_lo; out[t - t_lo]."""
    x = start
    out[j - t_lo] = x
    for i in range(j, t_lo, -1):
        x -= xi_at(key, box, i0, n0, fill, i - 1, x)
        out[i - 1 - t_lo] = x


@numba.njit(cache=True)
def halfline_step(key, box, i0, n0, fill, j, v, t_lo, cur, new):
    """r_{k+1}^+ from r_k^+ = cur for target (-inf, v] at time j."""
    new[j - t_lo] = v + 1
    for i in range(j, t_lo, -1):
        idx = i - t_lo
        a = new[idx]
        if a == cur[idx]:
            new[idx - 1] = a + 1
        else:
            new[idx - 1] = a - xi_at(key, box, i0, n0, fill, i - 1, a)


@numba.njit(cache=True)
def halfline_distance(key, box, i0, n0, fill, j, v, i_src, n_src):
    """D^RW((i_src, n_src); {j} x (-inf, v]), or UNREACHED."""
    if i_src > j:
        return UNREACHED
    if n_src > v + (j - i_src):
        return UNREACHED
    size = j - i_src + 1
    cur = np.empty(size, dtype=np.int64)
    new = np.empty(size, dtype=np.int64)
    dual_walk(key, box, i0, n0, fill, j, v + 1, i_src, cur)
    k = 0
    while cur[0] <= n_src:
        halfline_step(key, box, i0, n0, fill, j, v, i_src, cur, new)
        cur, new = new, cur
        k += 1
    return k


@numba.njit(cache=True)
def halfline_curve(key, box, i0, n0, fill, j, v, t_lo, k):
    """r_k^+ on times t_lo..j for the half-line target."""
    size = j - t_lo + 1
    cur = np.empty(size, dtype=np.int64)
    new = np.empty(size, dtype=np.int64)
    dual_walk(key, box, i0, n0, fill, j, v + 1, t_lo, cur)
    for _ in range(k):
        halfline_step(key, box, i0, n0, fill, j, v, t_lo, cur, new)
        cur, new = new, cur
    return cur


@numba.njit(cache=True)
def interval_step(key, box, i0, n0, fill, j, u, v, t_lo, t_k, up, lo, new_up, new_lo):
    """One radius step for a finite target; returns T_{k+1} or t_lo - 1.

    ``t_k == t_lo - 1`` means the radius-k curves did not meet above t_lo.
    Entries below the returned meet time are left stale.
    """
    new_up[j - t_lo] = v + 1
    new_lo[j - t_lo] = u - 1
    for i in range(j, t_lo, -1):
        idx = i - t_lo
        a = new_up[idx]
        b = new_lo[idx]
        if i > t_k and a == up[idx]:
            a += 1
        else:
            a -= xi_at(key, box, i0, n0, fill, i - 1, a)
        if i > t_k and b == lo[idx]:
            b -= 1
        else:
            b -= xi_at(key, box, i0, n0, fill, i - 1, b)
        new_up[idx - 1] = a
        new_lo[idx - 1] = b
        if i - 1 <= t_k and a == b:
            return i - 1
    return t_lo - 1


@numba.njit(cache=True)
def interval_initial(key, box, i0, n0, fill, j, u, v, t_lo, up, lo):
    a = v + 1
    b = u - 1
    up[j - t_lo] = a
    lo[j - t_lo] = b
    for i in range(j, t_lo, -1):
        a -= xi_at(key, box, i0, n0, fill, i - 1, a)
        b -= xi_at(key, box, i0, n0, fill, i - 1, b)
        up[i - 1 - t_lo] = a
        lo[i - 1 - t_lo] = b
        if a == b:
            return i - 1
    return t_lo - 1


@numba.njit(cache=True)
def interval_distance(key, box, i0, n0, fill, j, u, v, i_src, n_src):
    """D^RW((i_src, n_src); {j} x [u, v]), or UNREACHED."""
    span = j - i_src
    if span < 0 or n_src < u - span or n_src > v + span:
        return UNREACHED
    size = span + 1
    up = np.empty(size, dtype=np.int64)
    lo = np.empty(size, dtype=np.int64)
    new_up = np.empty(size, dtype=np.int64)
    new_lo = np.empty(size, dtype=np.int64)
    t_k = interval_initial(key, box, i0, n0, fill, j, u, v, i_src, up, lo)
    k = 0
    while True:
        if t_k < i_src and lo[0] < n_src < up[0]:
            return k
        if k > span:
            return UNREACHED
        t_k = interval_step(key, box, i0, n0, fill, j, u, v, i_src, t_k,
                            up, lo, new_up, new_lo)
        up, new_up = new_up, up
        lo, new_lo = new_lo, lo
        k += 1


@numba.njit(cache=True)
def initial_meet_depth(key, j, u, v, cap):
    """j - T_0 for the initial curves, capped at ``cap``."""
    a = v + 1
    b = u - 1
    for d in range(1, cap + 1):
        i = j - d + 1
        a -= sign_bit(key, i - 1, a)
        b -= sign_bit(key, i - 1, b)
        if a == b:
            return d
    return cap


# ----- batched entry points -------------------------------------------------

@numba.njit(cache=True, parallel=True)
def batch_halfline_distance(keys, j, v, i_src, n_src):
    out = np.empty(keys.shape[0], dtype=np.int64)
    for s in numba.prange(keys.shape[0]):
        out[s] = halfline_distance(keys[s], NO_BOX, 0, 0, 0, j, v, i_src, n_src)
    return out


@numba.njit(cache=True, parallel=True)
def batch_interval_distance(keys, j, u, v, i_src, n_src):
    out = np.empty(keys.shape[0], dtype=np.int64)
    for s in numba.prange(keys.shape[0]):
        out[s] = interval_distance(keys[s], NO_BOX, 0, 0, 0, j, u, v, i_src, n_src)
    return out


@numba.njit(cache=True, parallel=True)
def batch_halfline_value(keys, j, v, i, k):
    """r_k^+(i) per sample."""
    out = np.empty(keys.shape[0], dtype=np.int64)
    for s in numba.prange(keys.shape[0]):
        out[s] = halfline_curve(keys[s], NO_BOX, 0, 0, 0, j, v, i, k)[0]
    return out


@numba.njit(cache=True, parallel=True)
def batch_initial_meet_depth(keys, j, u, v, cap):
    out = np.empty(keys.shape[0], dtype=np.int64)
    for s in numba.prange(keys.shape[0]):
        out[s] = initial_meet_depth(keys[s], j, u, v, cap)
    return out


# ----- Seppalainen-Johansson last passage -----------------------------------

@numba.njit(cache=True)
def sj_weight(key, box, fill, a, b):
    if 0 < a < box.shape[0] and 0 <= b < box.shape[1]:
        w = box[a, b]
        if w >= 0:
            return np.int64(w)
    if fill >= 0:
        return np.int64(fill)
    return bit(key, a, b)


@numba.njit(cache=True)
def sj_last_passage(key, box, fill, m, n):
    """T(m, n) streaming along the shorter side.

    T(a, b) = max(T(a-1, b) + w(a, b), T(a, b-1)), T(0, b) = 0, row -1 = 0.
    ``box[a, b] >= 0`` overrides w(a, b); ``fill >= 0`` overrides the rest.
    """
    if m == 0:
        return 0
    if m <= n:
        row = np.zeros(m + 1, dtype=np.int64)
        for b in range(n + 1):
            for a in range(1, m + 1):
                x = row[a - 1] + sj_weight(key, box, fill, a, b)
                if x > row[a]:
                    row[a] = x
        return row[m]
    col = np.zeros(n + 1, dtype=np.int64)
    for a in range(1, m + 1):
        below = np.int64(0)
        for b in range(n + 1):
            x = col[b] + sj_weight(key, box, fill, a, b)
            if below > x:
                x = below
            col[b] = x
            below = x
    return col[n]


@numba.njit(cache=True)
def sj_halfline_distance(key, j, v, i_src, n_src):
    """min k with 2 T(j-k-i, k) + v + 2k + i - j + 1 > n_src, in one SJ field.

    The left side is nondecreasing in k for a fixed weight field, so the
    minimum has the law of the web distance to (-inf, v].
    """
    width = j - i_src
    if width < 0 or n_src > v + width:
        return UNREACHED
    row = np.zeros(width + 1, dtype=np.int64)
    for k in range(width + 1):
        cols = width - k
        for a in range(1, cols + 1):
            x = row[a - 1] + bit(key, a, k)
            if x > row[a]:
                row[a] = x
        if 2 * row[cols] + v + 2 * k + i_src - j + 1 > n_src:
            return k
    return UNREACHED


@numba.njit(cache=True, parallel=True)
def batch_sj_last_passage(keys, m, n):
    out = np.empty(keys.shape[0], dtype=np.int64)
    for s in numba.prange(keys.shape[0]):
        out[s] = sj_last_passage(keys[s], NO_BOX, -1, m, n)
    return out


@numba.njit(cache=True, parallel=True)
def batch_sj_halfline_distance(keys, j, v, i_src, n_src):
    out = np.empty(keys.shape[0], dtype=np.int64)
    for s in numba.prange(keys.shape[0]):
        out[s] = sj_halfline_distance(keys[s], j, v, i_src, n_src)
    return out


@numba.njit(cache=True)
def interval_curves(key, box, i0, n0, fill, j, u, v, t_lo, k, up, lo):
    """Radius-k curves into ``up``/``lo`` (length j - t_lo + 1); returns T_k or t_lo - 1."""
    new_up = np.empty_like(up)
    new_lo = np.empty_like(lo)
    t_k = interval_initial(key, box, i0, n0, fill, j, u, v, t_lo, up, lo)
    for _ in range(k):
        t_k = interval_step(key, box, i0, n0, fill, j, u, v, t_lo, t_k, up, lo, new_up, new_lo)
        up[:] = new_up
        lo[:] = new_lo
    return t_k


@numba.njit(cache=True, parallel=True)
def batch_interval_curves(keys, j, u, v, t_lo, k, times):
    """r_k^+ and r_k^- at ``times`` per sample, plus T_k."""
    size = j - t_lo + 1
    up_at = np.empty((keys.shape[0], times.shape[0]), dtype=np.int64)
    lo_at = np.empty((keys.shape[0], times.shape[0]), dtype=np.int64)
    meet = np.empty(keys.shape[0], dtype=np.int64)
    for s in numba.prange(keys.shape[0]):
        up = np.empty(size, dtype=np.int64)
        lo = np.empty(size, dtype=np.int64)
        meet[s] = interval_curves(keys[s], NO_BOX, 0, 0, 0, j, u, v, t_lo, k, up, lo)
        for q in range(times.shape[0]):
            up_at[s, q] = up[times[q] - t_lo]
            lo_at[s, q] = lo[times[q] - t_lo]
    return up_at, lo_at, meet
