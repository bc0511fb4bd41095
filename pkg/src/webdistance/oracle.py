"""Reference web distance by 0-1 shortest path.

The edge ``(i, n) -> (i+1, n + xi)`` is used by the walk and costs 0; the
sibling edge ``(i, n) -> (i+1, n - xi)`` is a jump and costs 1.  Distances to
a target ``{j} x I`` are found by a deque search over reversed edges inside a
finite window.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .web import (DomainError, LatticePoint, SignField, require_even,
                  walk_forward)

INF = math.inf
_UNREACHED = np.iinfo(np.int64).max
_ODD = -1


@dataclass(frozen=True)
class TargetSpec:
    """Target ``{time} x [lower, upper]``; ``lower is None`` means -infinity."""

    time: int
    lower: int | None
    upper: int

    def __post_init__(self):
        require_even(self.time, self.upper)
        if self.lower is not None:
            require_even(self.time, self.lower)
            if self.lower > self.upper:
                raise DomainError("empty target interval")

    @classmethod
    def point(cls, time: int, space: int) -> TargetSpec:
        return cls(time, space, space)

    @classmethod
    def interval(cls, time: int, lower: int, upper: int) -> TargetSpec:
        return cls(time, lower, upper)

    @classmethod
    def half_line(cls, time: int, upper: int) -> TargetSpec:
        return cls(time, None, upper)

    @property
    def is_half_line(self) -> bool:
        return self.lower is None

    def contains(self, space: int) -> bool:
        return space <= self.upper and (self.lower is None or space >= self.lower)


@dataclass(frozen=True)
class Window:
    """Rectangle of times ``t_min..t_max`` and spaces ``n_min..n_max``."""

    t_min: int
    t_max: int
    n_min: int
    n_max: int

    def __post_init__(self):
        if self.t_min > self.t_max or self.n_min > self.n_max:
            raise DomainError(f"malformed window {self}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.t_max - self.t_min + 1, self.n_max - self.n_min + 1

    def __contains__(self, p) -> bool:
        i, n = p
        return self.t_min <= i <= self.t_max and self.n_min <= n <= self.n_max


@dataclass(frozen=True, eq=False)
class DistanceField:
    window: Window
    target: TargetSpec
    values: np.ndarray  # [i - t_min, n - n_min]; _ODD on odd sites

    def __getitem__(self, p) -> float:
        i, n = p
        if p not in self.window:
            raise DomainError(f"{p} outside window")
        require_even(i, n)
        d = self.values[i - self.window.t_min, n - self.window.n_min]
        return INF if d == _UNREACHED else int(d)

    def points(self) -> Iterator[LatticePoint]:
        w = self.window
        for i in range(w.t_min, w.t_max + 1):
            first = w.n_min + ((i + w.n_min) % 2)
            for n in range(first, w.n_max + 1, 2):
                yield LatticePoint(i, n)

    def ball(self, k: int) -> set[LatticePoint]:
        return {p for p in self.points() if self[p] <= k}

    def rows(self) -> Iterator[tuple[int, int, float]]:
        for p in self.points():
            yield p.time, p.space, self[p]


def distance_field(field: SignField, target: TargetSpec, window: Window) -> DistanceField:
    """Exact window-restricted distances from every even window point to target."""
    w = window
    if w.t_max != target.time:
        raise DomainError("the window must end at the target time")
    if not target.is_half_line and (target.upper < w.n_min or target.lower > w.n_max):
        raise DomainError("target interval misses the window")
    dist = np.full(w.shape, _UNREACHED, dtype=np.int64)
    for i in range(w.t_min, w.t_max + 1):
        dist[i - w.t_min, (w.n_min + i + 1) % 2::2] = _ODD

    queue: deque[tuple[int, int, int]] = deque()
    j = target.time
    lo = w.n_min if target.is_half_line else max(target.lower, w.n_min)
    for m in range(lo + (j + lo) % 2, min(target.upper, w.n_max) + 1, 2):
        dist[j - w.t_min, m - w.n_min] = 0
        queue.append((0, j, m))

    while queue:
        d, i, m = queue.popleft()
        if d > dist[i - w.t_min, m - w.n_min]:
            continue
        if i == w.t_min:
            continue
        for prev in (m - 1, m + 1):
            if not w.n_min <= prev <= w.n_max:
                continue
            cost = 0 if prev + field._xi(i - 1, prev) == m else 1
            nd = d + cost
            cell = (i - 1 - w.t_min, prev - w.n_min)
            if nd < dist[cell]:
                dist[cell] = nd
                if cost:
                    queue.append((nd, i - 1, prev))
                else:
                    queue.appendleft((nd, i - 1, prev))
    return DistanceField(w, target, dist)


def cone_window(source: LatticePoint, target: TargetSpec, margin: int | None = None) -> Window:
    """Window around the source-to-target corridor, clipped to the light cone.

    Every directed path from ``source`` stays within ``|n - source.space| <=
    elapsed time``, so the clipped window is exact once ``margin`` reaches
    the cone.
    """
    span = target.time - source.time
    lo = source.space - span
    hi = source.space + span
    if margin is not None:
        t_lo = source.space if target.is_half_line else min(source.space, target.lower)
        lo = max(lo, min(t_lo, target.upper) - margin)
        hi = min(hi, max(source.space, target.upper) + margin)
    return Window(source.time, target.time, lo, hi)


def distance_point(field: SignField, source: LatticePoint, target: TargetSpec) -> float:
    """D^RW(source; target) with an adaptively grown window."""
    require_even(*source)
    if source.time > target.time:
        return INF
    if source.time == target.time:
        return 0 if target.contains(source.space) else INF
    span = target.time - source.time
    full = cone_window(source, target)
    margin = max(2, math.ceil(4 * math.sqrt(span)))
    previous = None
    stable = 0
    while True:
        win = cone_window(source, target, margin)
        d = distance_field(field, target, win)[source] if _meets(win, target) else INF
        if win == full:
            return d
        stable = stable + 1 if d == previous else 0
        if stable >= 2:
            return d
        previous = d
        margin *= 2


def _meets(win: Window, target: TargetSpec) -> bool:
    return target.is_half_line or (target.upper >= win.n_min and target.lower <= win.n_max)


def jump_witness(dfield: DistanceField, field: SignField, source: LatticePoint) -> list[LatticePoint]:
    """Jump points of a geodesic from ``source`` read off the distance field.

    Raises ``DomainError`` when the source is at infinite distance.
    """
    d = dfield[source]
    if d == INF:
        raise DomainError("no path to the target")
    jumps = []
    i, n = source
    w = dfield.window
    while i < w.t_max:
        s = field._xi(i, n)
        here = dfield[i, n]
        walk = (i + 1, n + s)
        if walk in w and dfield[walk] == here:
            n += s
        else:
            jumps.append(LatticePoint(i, n))
            n -= s
        i += 1
    return jumps


def replay_witness(field: SignField, source: LatticePoint, jumps: list[LatticePoint],
                   end_time: int) -> int:
    """Follow walk segments between the given jumps; return the final position.

    Raises ``DomainError`` if a jump point is not on the current segment.
    """
    cur = LatticePoint(*source)
    for jp in jumps:
        seg = walk_forward(field, cur, jp.time)
        if seg.values[-1] != jp.space:
            raise DomainError(f"jump point {jp} not reached by the walk segment")
        cur = LatticePoint(jp.time + 1, jp.space - field._xi(jp.time, jp.space))
    return walk_forward(field, cur, end_time).values[-1]
