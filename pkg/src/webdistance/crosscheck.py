"""Ball-equivalence checks between the distance oracle and the two boundary
constructions.

``exhaustive_crosscheck`` covers every sign configuration on the backward
light cone of a target over a fixed number of columns.  The sign at a site
only matters through the first-step choices of the paths and curves that
read it, so the three computations are run column by column and identical
partial states are merged, with a multiplicity that counts the sign
configurations they stand for.  Sites whose sign cannot change the next
layer are not branched on; they contribute a factor of 2 each.

The per-layer state holds

* capped distances min(D, K + 1) of every cone point in the current column;
* the local-rule curves r_k^+/r_k^- with a status (0: not met, 1: met in
  this column, 2: met earlier);
* for the launch recursion, the set of positions of all launched dual walks
  per level and side, again with a status.

``random_crosscheck`` runs the plain reference implementations on random
fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
from numba import types
from numba.typed import Dict

from ._rng import mix64
from .boundary import _recursion_step, boundaries, initial_boundary, region_membership
from .oracle import TargetSpec, Window, distance_field
from .web import DomainError, LatticePoint, SignField

MAX_RADIUS = 3


@dataclass
class CrosscheckReport:
    mode: str
    targets: list
    columns: int
    radius: int
    configurations: int = 0
    states_per_layer: dict = field(default_factory=dict)
    mismatches: int = 0
    first_mismatch: object = None

    @property
    def ok(self) -> bool:
        return self.mismatches == 0 and self.configurations > 0

    def as_dict(self) -> dict:
        return {
            "mode": self.mode, "targets": self.targets, "columns": self.columns,
            "radius": self.radius, "configurations": self.configurations,
            "states_per_layer": self.states_per_layer, "mismatches": self.mismatches,
            "first_mismatch": self.first_mismatch, "ok": self.ok,
        }


# ----- layered exhaustive search --------------------------------------------
# positions are shifted by ``shift`` so that index 0 is two steps outside the cone

@numba.njit(cache=True)
def _layout(width, radius):
    d_len = width
    a_off = d_len
    r_off = a_off + 3 * (radius + 1)
    return a_off, r_off, r_off + 3 * radius


@numba.njit(cache=True)
def _initial_state(width, radius, u_idx, v_idx):
    a_off, r_off, length = _layout(width, radius)
    cap = radius + 1
    st = np.full(length, 0, dtype=np.int64)
    st[:width] = cap
    for p in range(u_idx, v_idx + 1, 2):
        st[p] = 0
    for k in range(radius + 1):
        st[a_off + 3 * k] = v_idx + 1
        st[a_off + 3 * k + 1] = u_idx - 1
    for k in range(radius):
        st[r_off + 3 * k] = np.int64(1) << (v_idx + 1)
        st[r_off + 3 * k + 1] = np.int64(1) << (u_idx - 1)
    return st


@numba.njit(cache=True)
def _mask_max(m):
    p = -1
    while m:
        m >>= 1
        p += 1
    return p


@numba.njit(cache=True)
def _mask_min(m):
    p = 0
    while not (m >> p) & 1:
        p += 1
    return p


@numba.njit(cache=True)
def _relevant(state, width, radius, sites_lo, sites_hi, out):
    """Positions whose sign the transition reads; returns how many."""
    a_off, r_off, _ = _layout(width, radius)
    flag = np.zeros(width, dtype=np.bool_)
    for p in range(sites_lo, sites_hi + 1, 2):
        if state[p - 1] != state[p + 1]:
            flag[p] = True
    for k in range(radius + 1):
        if state[a_off + 3 * k + 2] == 0:
            flag[state[a_off + 3 * k]] = True
            flag[state[a_off + 3 * k + 1]] = True
    for k in range(radius):
        if state[r_off + 3 * k + 2] == 0:
            for side in range(2):
                m = state[r_off + 3 * k + side]
                p = 0
                while m:
                    if m & 1:
                        flag[p] = True
                    m >>= 1
                    p += 1
    count = 0
    for p in range(width):
        if flag[p]:
            out[count] = p
            count += 1
    return count


@numba.njit(cache=True)
def _transition(state, xi, width, radius, sites_lo, sites_hi, new):
    """One column backwards; ``xi[p]`` is the sign at p (0: not read)."""
    a_off, r_off, _ = _layout(width, radius)
    cap = radius + 1
    new[:width] = cap
    for p in range(sites_lo, sites_hi + 1, 2):
        s = xi[p]
        if s == 0:
            s = 1  # both neighbours agree, either choice gives the same value
        val = state[p + s]
        jump = state[p - s] + 1
        if jump < val:
            val = jump
        new[p] = val if val < cap else cap
    # local evolution rule
    for k in range(radius + 1):
        b = a_off + 3 * k
        if state[b + 2] >= 1:
            new[b] = -1
            new[b + 1] = -1
            new[b + 2] = 2
            continue
        up = state[b]
        lo = state[b + 1]
        if k == 0:
            nu = up - xi[up]
            nl = lo - xi[lo]
            meet = nu == nl
        else:
            pb = b - 3
            refl = state[pb + 2] == 0
            nu = up + 1 if refl and up == state[pb] else up - xi[up]
            nl = lo - 1 if refl and lo == state[pb + 1] else lo - xi[lo]
            meet = new[pb + 2] >= 1 and nu == nl
        new[b] = nu
        new[b + 1] = nl
        new[b + 2] = 1 if meet else 0
    # launch recursion: level k + 1 launches just outside level k
    for k in range(radius):
        b = r_off + 3 * k
        if state[b + 2] >= 1:
            new[b] = 0
            new[b + 1] = 0
            new[b + 2] = 2
            continue
        if k == 0:
            pst = state[a_off + 2]
            pu = state[a_off]
            pl = state[a_off + 1]
            nprev = new[a_off + 2]
        else:
            pb = b - 3
            pst = state[pb + 2]
            pu = _mask_max(state[pb]) if pst <= 1 else 0
            pl = _mask_min(state[pb + 1]) if pst <= 1 else 0
            nprev = new[pb + 2]
        masks = (state[b], state[b + 1])
        out = [np.int64(0), np.int64(0)]
        for side in range(2):
            m = masks[side]
            acc = np.int64(0)
            p = 0
            while m:
                if m & 1:
                    acc |= np.int64(1) << (p - xi[p])
                m >>= 1
                p += 1
            out[side] = acc
        if pst <= 1:
            out[0] |= np.int64(1) << (pu + 1)
            out[1] |= np.int64(1) << (pl - 1)
        new[b] = out[0]
        new[b + 1] = out[1]
        meet = nprev >= 1 and _mask_max(out[0]) == _mask_min(out[1])
        new[b + 2] = 1 if meet else 0


@numba.njit(cache=True)
def _balls_agree(new, width, radius, parity):
    """Oracle, local-rule and recursion balls agree on the new column."""
    a_off, r_off, _ = _layout(width, radius)
    for k in range(radius + 1):
        b = a_off + 3 * k
        a_open = new[b + 2] == 0
        r_open = True
        rlo = rhi = 0
        if k >= 1:
            rb = r_off + 3 * (k - 1)
            r_open = new[rb + 2] == 0
            if r_open:
                rhi = _mask_max(new[rb])
                rlo = _mask_min(new[rb + 1])
        for p in range(parity, width, 2):
            in_oracle = new[p] <= k
            in_local = a_open and new[b + 1] < p < new[b]
            if in_oracle != in_local:
                return False
            if k >= 1:
                in_rec = r_open and rlo < p < rhi
                if in_oracle != in_rec:
                    return False
    return True


@numba.njit(cache=True)
def _hash_row(row):
    h = np.uint64(0x243F6A8885A308D3)
    for x in row:
        h = mix64(h ^ np.uint64(x))
    return h


@numba.njit(cache=True)
def _insert(table, store, weights, count, row, w):
    h = _hash_row(row)
    while True:
        if h not in table:
            if count == store.shape[0]:
                return -1  # caller grows the store and retries
            store[count] = row
            weights[count] = w
            table[h] = count
            return count + 1
        idx = table[h]
        same = True
        for q in range(row.shape[0]):
            if store[idx, q] != row[q]:
                same = False
                break
        if same:
            weights[idx] += w
            return count
        h += np.uint64(1)


@numba.njit(cache=True)
def _advance_layer(states, weights, n_states, width, radius, sites_lo, sites_hi, n_sites,
                   parity, store, new_weights, keep):
    """Expand every state over its relevant signs.

    Returns (new state count or -1 if ``store`` is full, mismatch weight,
    covered weight).
    """
    table = Dict.empty(key_type=types.uint64, value_type=types.int64)
    count = 0
    bad = 0.0
    covered = 0.0
    rel = np.empty(width, dtype=np.int64)
    xi = np.zeros(width, dtype=np.int64)
    new = np.empty(states.shape[1], dtype=np.int64)
    for s in range(n_states):
        state = states[s]
        r = _relevant(state, width, radius, sites_lo, sites_hi, rel)
        in_cone = 0
        for q in range(r):
            if sites_lo <= rel[q] <= sites_hi:
                in_cone += 1
        # every read lies in the cone column
        if in_cone != r:
            return -2, bad, covered
        w = weights[s] * 2.0 ** (n_sites - r)
        for bits in range(1 << r):
            xi[:] = 0
            for q in range(r):
                xi[rel[q]] = 1 if (bits >> q) & 1 else -1
            _transition(state, xi, width, radius, sites_lo, sites_hi, new)
            covered += w
            if not _balls_agree(new, width, radius, parity):
                bad += w
            if keep:
                count = _insert(table, store, new_weights, count, new, w)
                if count < 0:
                    return -1, bad, covered
    return count, bad, covered


def exhaustive_crosscheck(lower: int, upper: int, columns: int = 8,
                          radius: int = MAX_RADIUS) -> CrosscheckReport:
    """All sign fields on the light cone of ``{0} x [lower, upper]`` over ``columns`` times.

    Weights are floats; they are exact up to 2^53 configurations.
    """
    if columns < 1 or radius < 0:
        raise DomainError("need at least one column and a non-negative radius")
    target = TargetSpec.interval(0, lower, upper)
    depth = columns - 1
    shift = depth + 2 - lower
    width = upper - lower + 2 * depth + 5
    if width > 62:
        raise DomainError("window too wide for the bitmask state")
    u_idx, v_idx = lower + shift, upper + shift
    state = _initial_state(width, radius, u_idx, v_idx)
    states = state[None, :].copy()
    weights = np.ones(1)
    report = CrosscheckReport("exhaustive", [[target.lower, target.upper]], columns, radius)
    total_sites = 0
    for d in range(depth):
        sites_lo = u_idx - d - 1
        sites_hi = v_idx + d + 1
        n_sites = (sites_hi - sites_lo) // 2 + 1
        total_sites += n_sites
        keep = d < depth - 1
        cap = max(1024, 4 * states.shape[0])
        while True:
            store = np.empty((cap, states.shape[1]), dtype=np.int64)
            new_w = np.zeros(cap)
            count, bad, covered = _advance_layer(
                states, weights, states.shape[0], width, radius, sites_lo, sites_hi,
                n_sites, sites_lo % 2, store, new_w, keep)
            if count == -2:
                raise RuntimeError("a curve read a sign outside the cone")
            if count >= 0:
                break
            cap *= 4
        report.mismatches += int(bad)
        if covered != 2.0 ** total_sites:
            raise RuntimeError("configuration count does not add up")
        report.states_per_layer[d] = states.shape[0]
        states, weights = store[:count], new_w[:count]
    report.configurations = 2 ** total_sites if depth else 1
    return report


def replay_layers(signs: dict[tuple[int, int], int], lower: int, upper: int, columns: int,
                  radius: int = MAX_RADIUS) -> list[list[set[int]]]:
    """Run the layered transition on one concrete field (target at time 0).

    Returns, per depth 1..columns-1 and per radius, the oracle ball's space
    coordinates, for comparison with the reference implementations.  Raises
    if the three layered constructions disagree.
    """
    depth = columns - 1
    shift = depth + 2 - lower
    width = upper - lower + 2 * depth + 5
    state = _initial_state(width, radius, lower + shift, upper + shift)
    new = np.empty_like(state)
    out = []
    for d in range(depth):
        sites_lo = lower + shift - d - 1
        sites_hi = upper + shift + d + 1
        xi = np.zeros(width, dtype=np.int64)
        for p in range(sites_lo, sites_hi + 1, 2):
            xi[p] = signs[(-d - 1, p - shift)]
        _transition(state, xi, width, radius, sites_lo, sites_hi, new)
        if not _balls_agree(new, width, radius, sites_lo % 2):
            raise AssertionError(f"layered constructions disagree at depth {d + 1}")
        out.append([{p - shift for p in range(sites_lo % 2, width, 2) if new[p] <= k}
                    for k in range(radius + 1)])
        state = new.copy()
    return out


# ----- randomized check with the reference implementations ------------------

def _balls_match(field: SignField, target: TargetSpec, horizon: int,
                 n_lo: int, n_hi: int, radius: int):
    j = target.time
    span = j - horizon
    lo = (n_lo if target.is_half_line else min(n_lo, target.lower)) - span
    hi = max(n_hi, target.upper) + span
    dfield = distance_field(field, target, Window(horizon, j, lo, hi))
    local = boundaries(field, target, radius, horizon=horizon)
    rec = initial_boundary(field, target, horizon)
    for k in range(radius + 1):
        if k:
            rec = _recursion_step(field, rec)
        for i in range(horizon, j + 1):
            for n in range(n_lo + (i + n_lo) % 2, n_hi + 1, 2):
                p = LatticePoint(i, n)
                a = dfield[p] <= k
                if a != region_membership(local[k], p) or a != region_membership(rec, p):
                    return (k, i, n)
    return None


def random_crosscheck(trials: int, seed: int, size: int = 40,
                      radius: int = MAX_RADIUS) -> CrosscheckReport:
    """Random fields; comparison region ``size`` times by ``size`` spaces.

    Targets alternate between points, short intervals and half-lines at the
    last time of the region.
    """
    if trials < 1 or size < 2:
        raise DomainError("need a trial and a region of at least 2 x 2")
    rng = np.random.default_rng(seed)
    report = CrosscheckReport("random", [], size, radius)
    j = 0
    horizon = j - size + 1
    n_lo, n_hi = -(size // 2), size - size // 2 - 1
    for t in range(trials):
        field_seed = int(rng.integers(0, 2 ** 62))
        kind = t % 3
        centre = 2 * int(rng.integers(-size // 8, size // 8 + 1))
        if kind == 0:
            target = TargetSpec.point(j, centre)
        elif kind == 1:
            target = TargetSpec.interval(j, centre, centre + 2 * int(rng.integers(1, 4)))
        else:
            target = TargetSpec.half_line(j, centre)
        bad = _balls_match(SignField(field_seed), target, horizon, n_lo, n_hi, radius)
        report.targets.append([target.lower, target.upper])
        report.configurations += 1
        if bad is not None:
            report.mismatches += 1
            if report.first_mismatch is None:
                report.first_mismatch = {"seed": field_seed, "target": [target.lower, target.upper],
                                         "radius_time_space": list(bad)}
    return report
