"""Boundary curves of web-distance balls around a target ``{j} x [u, v]``.

The ball of radius k is enclosed by two dual-lattice curves r_k^+ (above)
and r_k^- (below) that start at ``v + 1`` and ``u - 1`` at time j and meet,
going backwards, at time T_k.  Three constructions are provided:

* ``advance_boundary``: the local rule; r_{k+1}^+ takes a dual-walk step
  unless it sits on r_k^+, in which case it is pushed up by one.
* ``boundary_by_recursion``: max (min) over dual walks launched just outside
  the previous curve.  Quadratic; kept as an independent check.
* ``curves_from_walks`` / ``lpp_curve``: iterated discrete Skorokhod
  reflection of given walks and the equivalent last-passage maximum.

For half-line targets ``(-inf, v]`` only r^+ exists and there is no meet
time, so curves are computed down to a caller-supplied horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oracle import TargetSpec
from .web import (DomainError, LatticePoint, SignField, require_even,
                  walk_backward)

_FIRST_CHUNK = 16


@dataclass(frozen=True, eq=False)
class BoundaryPair:
    """Curves r_k^+ / r_k^- on times ``floor..target.time``.

    If the curves met, ``meet_time == floor``.  Otherwise ``meet_time`` is
    None and the curves were followed down to ``floor == horizon`` without
    meeting (always the case for half-line targets).
    """

    target: TargetSpec
    k: int
    floor: int
    upper: np.ndarray
    lower: np.ndarray | None
    meet_time: int | None
    horizon: int | None = None

    @property
    def times(self) -> range:
        return range(self.floor, self.target.time + 1)

    def r_plus(self, i: int) -> int:
        return int(self.upper[self._index(i)])

    def r_minus(self, i: int) -> int:
        if self.lower is None:
            raise DomainError("half-line targets have no lower curve")
        return int(self.lower[self._index(i)])

    def _index(self, i: int) -> int:
        if not self.floor <= i <= self.target.time:
            raise DomainError(f"time {i} outside [{self.floor}, {self.target.time}]")
        return i - self.floor


@dataclass(frozen=True, eq=False)
class DrivingWalks:
    """Walks s_0..s_K sampled at times ``start_time .. start_time + L - 1``."""

    start_time: int
    values: np.ndarray  # shape (K + 1, L)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int64)
        if vals.ndim != 2 or vals.shape[1] < 1:
            raise DomainError("walk values must be a (K+1, L) array")
        if vals.shape[1] > 1 and not np.all(np.abs(np.diff(vals, axis=1)) == 1):
            raise DomainError("walk increments must be +-1")
        object.__setattr__(self, "values", vals)

    @property
    def end_time(self) -> int:
        return self.start_time + self.values.shape[1] - 1

    @property
    def count(self) -> int:
        return self.values.shape[0]


def _check_horizon(target: TargetSpec, horizon: int | None) -> None:
    if target.is_half_line and horizon is None:
        raise DomainError("half-line targets need a horizon")
    if horizon is not None and horizon > target.time:
        raise DomainError("horizon lies after the target time")


def _pair(target, k, top, bottom, meet, horizon) -> BoundaryPair:
    # top/bottom were built from time j downwards
    upper = np.array(top[::-1], dtype=np.int64)
    lower = None if bottom is None else np.array(bottom[::-1], dtype=np.int64)
    floor = target.time - len(top) + 1
    return BoundaryPair(target, k, floor, upper, lower, meet, horizon)


def initial_boundary(field: SignField, target: TargetSpec,
                     horizon: int | None = None) -> BoundaryPair:
    """r_0^+/r_0^-: dual walks from ``(j, v + 1)`` and ``(j, u - 1)``."""
    _check_horizon(target, horizon)
    j = target.time
    top = [target.upper + 1]
    bottom = None if target.is_half_line else [target.lower - 1]
    meet = None
    i = j
    while horizon is None or i > horizon:
        a = top[-1]
        top.append(a - field._xi(i - 1, a))
        if bottom is not None:
            b = bottom[-1]
            bottom.append(b - field._xi(i - 1, b))
            if top[-1] == bottom[-1]:
                meet = i - 1
                break
        i -= 1
    return _pair(target, 0, top, bottom, meet, horizon)


def advance_boundary(field: SignField, pair: BoundaryPair) -> BoundaryPair:
    """Radius k+1 curves from radius k by the local evolution rule."""
    target = pair.target
    j = target.time
    horizon = pair.horizon
    # reflection is active while i > T_k; without a meet it never switches off
    t_k = pair.meet_time if pair.meet_time is not None else horizon - 1
    top = [target.upper + 1]
    bottom = None if target.is_half_line else [target.lower - 1]
    meet = None
    i = j
    while horizon is None or i > horizon:
        a = top[-1]
        if i > t_k and a == pair.upper[i - pair.floor]:
            top.append(a + 1)
        else:
            top.append(a - field._xi(i - 1, a))
        if bottom is not None:
            b = bottom[-1]
            if i > t_k and b == pair.lower[i - pair.floor]:
                bottom.append(b - 1)
            else:
                bottom.append(b - field._xi(i - 1, b))
            if i - 1 <= t_k and top[-1] == bottom[-1]:
                meet = i - 1
                break
        i -= 1
    return _pair(target, pair.k + 1, top, bottom, meet, horizon)


def boundaries(field: SignField, target: TargetSpec, k_max: int,
               horizon: int | None = None) -> list[BoundaryPair]:
    """Curves for radii 0..k_max by iterating ``advance_boundary``."""
    pairs = [initial_boundary(field, target, horizon)]
    for _ in range(k_max):
        pairs.append(advance_boundary(field, pairs[-1]))
    return pairs


def _launch_extremes(field, start_time, launches, bottom, pick):
    """pick (max/min) over dual walks launched at ``(l, n_l)``, per time."""
    j = start_time
    best = {}
    for l, n_l in launches:
        if l < bottom:
            continue
        path = walk_backward(field, LatticePoint(l, n_l), bottom)
        for t, x in zip(path.times, path.values):
            best[t] = x if t not in best else pick(best[t], x)
    return [best[t] for t in range(j, bottom - 1, -1)]


def _recursion_step(field, pair: BoundaryPair) -> BoundaryPair:
    target = pair.target
    j = target.time
    horizon = pair.horizon
    if pair.meet_time is not None:
        first_launch = pair.meet_time - 1
        t_k = pair.meet_time
    else:
        first_launch = pair.floor
        t_k = horizon - 1

    def previous(curve, i, edge):
        return edge if i == j + 1 else int(curve[i - pair.floor])

    up_launch = [(l, previous(pair.upper, l + 1, target.upper) + 1)
                 for l in range(j, first_launch - 1, -1)]
    lo_launch = None
    if pair.lower is not None:
        lo_launch = [(l, previous(pair.lower, l + 1, target.lower) - 1)
                     for l in range(j, first_launch - 1, -1)]

    depth = 2 * (j - first_launch) + _FIRST_CHUNK
    while True:
        bottom = j - depth if horizon is None else max(j - depth, horizon)
        top = _launch_extremes(field, j, up_launch, bottom, max)
        if lo_launch is None:
            return _pair(target, pair.k + 1, top, None, None, horizon)
        low = _launch_extremes(field, j, lo_launch, bottom, min)
        for offset, (a, b) in enumerate(zip(top, low)):
            if j - offset <= t_k and a == b:
                cut = offset + 1
                return _pair(target, pair.k + 1, top[:cut], low[:cut], j - offset, horizon)
        if bottom == horizon:
            return _pair(target, pair.k + 1, top, low, None, horizon)
        depth *= 2


def boundary_by_recursion(field: SignField, target: TargetSpec, k: int,
                          horizon: int | None = None) -> BoundaryPair:
    """r_k^+/r_k^- from the max/min-over-launched-dual-walks definition."""
    pair = initial_boundary(field, target, horizon)
    for _ in range(k):
        pair = _recursion_step(field, pair)
    return pair


def region_membership(pair: BoundaryPair, p: LatticePoint) -> bool:
    """Whether the even point ``p`` lies in the radius-k ball."""
    require_even(*p)
    i, n = p
    if i > pair.target.time:
        return False
    if pair.meet_time is not None and i <= pair.meet_time:
        return False
    if i < pair.floor:
        raise DomainError(f"time {i} is below the explored horizon {pair.floor}")
    if n >= pair.r_plus(i):
        return False
    return pair.lower is None or n > pair.r_minus(i)


def curves_from_walks(walks: DrivingWalks, v: int) -> list[np.ndarray]:
    """Upper curves r_0^+..r_K^+ by iterated Skorokhod reflection.

    r_0^+(i) = s_0(i) - s_0(j) + v + 1 and
    r_{m+1}^+(i) = s_{m+1}(i) - min_{i<=l<=j} (s_{m+1}(l) - r_m^+(l+1) - 1),
    with r_m^+(j+1) = v.
    """
    s = walks.values
    curve = s[0] - s[0, -1] + v + 1
    curves = [curve]
    for m in range(1, walks.count):
        shifted = np.append(curve[1:], v)  # r_m(l + 1)
        gap = s[m] - shifted - 1
        suffix_min = np.minimum.accumulate(gap[::-1])[::-1]
        curve = s[m] - suffix_min
        curves.append(curve)
    return curves


def lpp_curve(walks: DrivingWalks, v: int, k: int, i: int) -> int:
    """Last-passage form of r_k^+(i) over chains i = l_k <= ... <= l_{-1} = j - k.

    Row m of the chain reads walk s_m with a lag of ``k - m`` steps, which
    turns the Skorokhod recursion into a plain corner-growth maximum.
    """
    j = walks.end_time
    if k < 0 or k >= walks.count:
        raise DomainError(f"need walks s_0..s_{k}")
    if i > j - k:
        raise DomainError(f"chain does not fit: i={i} > j-k={j - k}")
    if i < walks.start_time:
        raise DomainError("i precedes the walks")
    s = walks.values
    t0 = walks.start_time
    width = j - k - i
    # best[x]: best partial chain for rows <= m whose row-m start is l_m = i + x
    best = np.zeros(width + 1, dtype=np.int64)
    for m in range(k + 1):
        lag = k - m
        row = s[m, i + lag - t0: j - m - t0 + 1]  # s_m(x + lag), x = i..j-k
        new = np.empty_like(best)
        new[width] = best[width] if m else 0
        for x in range(width - 1, -1, -1):
            step = new[x + 1] + row[x] - row[x + 1]
            new[x] = max(step, best[x]) if m else step
        best = new
    return int(best[0]) + k + v + 1


def extract_driving_walks(field: SignField, pairs: list[BoundaryPair]) -> DrivingWalks:
    """Walks that reproduce the given half-line upper curves exactly.

    s_0 is r_0^+ itself and s_{m} steps by ``-xi`` read at r_m^+; while r_m^+
    is being pushed up the step value is irrelevant to the reflection.
    """
    floor = max(p.floor for p in pairs)
    j = pairs[0].target.time
    rows = []
    for m, pair in enumerate(pairs):
        curve = pair.upper[floor - pair.floor:]
        if m == 0:
            rows.append(curve.copy())
            continue
        s = np.empty_like(curve)
        s[-1] = curve[-1]
        for i in range(j, floor, -1):
            s[i - 1 - floor] = s[i - floor] - field._xi(i - 1, int(curve[i - floor]))
        rows.append(s)
    return DrivingWalks(floor, np.vstack(rows))
