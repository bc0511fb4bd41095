"""Last-passage solvers.

* Seppalainen-Johansson (SJ) model: Bernoulli(1/2) weights on horizontal
  edges, free vertical edges.
* Brownian last passage with a boundary function, restricted to a time
  grid, by a corner-growth DP and by iterated Skorokhod reflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from . import _kernels, _rng
from .web import DomainError


@dataclass(frozen=True, eq=False)
class SJInstance:
    """T(m, n) environment: weights w(a, b), a = 1..m, b = 0..n.

    ``weights`` (shape ``(m + 1, n + 1)``, column 0 ignored) or ``fill``
    pin the weights; otherwise they are hashed from ``seed``.
    """

    m: int
    n: int
    seed: int = 0
    weights: np.ndarray | None = None
    fill: int | None = None

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise DomainError("m and n must be non-negative")
        if self.weights is not None and self.weights.shape != (self.m + 1, self.n + 1):
            raise DomainError("weights must have shape (m + 1, n + 1)")

    def weight(self, a: int, b: int) -> int:
        if self.weights is not None:
            return int(self.weights[a, b])
        if self.fill is not None:
            return self.fill
        return int(_rng.bit(_rng.stream_key(self.seed, _rng.STREAM_SJ), a, b))

    def table(self) -> np.ndarray:
        """All weights as an ``(m + 1, n + 1)`` array."""
        return np.array([[self.weight(a, b) if a else 0 for b in range(self.n + 1)]
                         for a in range(self.m + 1)], dtype=np.int64)


def sj_last_passage(inst: SJInstance) -> int:
    """T(m, n) with O(min(m, n)) memory."""
    key = _rng.stream_key(inst.seed, _rng.STREAM_SJ)
    if inst.weights is not None:
        box = inst.weights.astype(np.int8)
        fill = -1
    else:
        box = _kernels.NO_BOX
        fill = -1 if inst.fill is None else inst.fill
    return int(_kernels.sj_last_passage(key, box, np.int64(fill), inst.m, inst.n))


def sj_shape(x: float, y: float) -> float:
    return x - (math.sqrt(x) - math.sqrt(y)) ** 2 / 2


def sj_scale(x: float, y: float) -> float:
    return (x - y) ** (2 / 3) / (2 * (x * y) ** (1 / 6))


def _sj_size(x, y, n):
    if not x > y > 0:
        raise DomainError("need x > y > 0")
    return math.floor(x * n), math.floor(y * n)


def standardize_sj(t, x: float, y: float, n: int):
    return (np.asarray(t, dtype=float) - sj_shape(x, y) * n) / (sj_scale(x, y) * n ** (1 / 3))


def sj_fluctuation_sample(x: float, y: float, n: int, seed: int,
                          fill: int | None = None) -> float:
    """(T(xn, yn) - shape * n) / (scale * n^(1/3)); tends to Tracy-Widom GUE."""
    m, rows = _sj_size(x, y, n)
    t = sj_last_passage(SJInstance(m, rows, seed=seed, fill=fill))
    return float(standardize_sj(t, x, y, n))


def sj_fluctuation_samples(x: float, y: float, n: int, count: int, seed: int) -> np.ndarray:
    """``count`` independent standardized samples; sample s uses seed ``derive_seed(seed, s)``."""
    m, rows = _sj_size(x, y, n)
    keys = _rng.sample_keys(seed, count, _rng.STREAM_SJ)
    return standardize_sj(_kernels.batch_sj_last_passage(keys, m, rows), x, y, n)


@dataclass(frozen=True, eq=False)
class BrownianGrid:
    """Brownian lines W_2..W_{n_max} and a boundary f on the grid t_g = g * step."""

    step: float
    lines: np.ndarray     # shape (n_max - 1, G); row r holds W_{r+2}
    boundary: np.ndarray  # shape (G,)

    def __post_init__(self):
        if self.step <= 0:
            raise DomainError("grid step must be positive")
        if self.lines.ndim != 2 or self.lines.shape[1] != self.boundary.shape[0]:
            raise DomainError("lines and boundary must share the grid")
        if self.lines.shape[1] and np.any(self.lines[:, 0] != 0):
            raise DomainError("Brownian lines must start at 0")

    @property
    def horizon(self) -> float:
        return self.step * (self.boundary.shape[0] - 1)

    @property
    def n_max(self) -> int:
        return self.lines.shape[0] + 1

    @classmethod
    def sample(cls, n_max: int, points: int, step: float, seed: int,
               boundary: np.ndarray | None = None) -> BrownianGrid:
        """Gaussian increments of variance ``step``; default boundary is an independent BM."""
        rng = np.random.default_rng(seed)
        incr = rng.normal(0.0, math.sqrt(step), size=(n_max, points - 1))
        paths = np.concatenate([np.zeros((n_max, 1)), np.cumsum(incr, axis=1)], axis=1)
        if boundary is None:
            boundary = paths[0]
        return cls(step, paths[1:], np.asarray(boundary, dtype=float))

    def line(self, i: int) -> np.ndarray:
        return self.lines[i - 2]


def _check_level(grid: BrownianGrid, n: int) -> None:
    if n < 1:
        raise DomainError("n must be at least 1")
    if n > grid.n_max:
        raise DomainError(f"grid only carries lines up to {grid.n_max}")


@numba.njit(cache=True)
def _corner_growth(boundary, lines, n):
    prev = boundary.copy()
    for m in range(n - 1):
        w = lines[m]
        cur = np.empty_like(prev)
        cur[0] = prev[0]
        for g in range(1, prev.shape[0]):
            stay = cur[g - 1] + (w[g] - w[g - 1])
            cur[g] = stay if stay > prev[g] else prev[g]
        prev = cur
    return prev


def brownian_lpp_dp(grid: BrownianGrid, n: int) -> np.ndarray:
    """L^f(t_g, n) by the chain DP: extend on line n or enter it at t_g."""
    _check_level(grid, n)
    return _corner_growth(grid.boundary, grid.lines, n)


def brownian_lpp_skorokhod(grid: BrownianGrid, n: int) -> np.ndarray:
    """L^f(t, n) = W_n(t) - min_{s <= t} (W_n(s) - L^f(s, n - 1)), L^f(., 1) = f."""
    _check_level(grid, n)
    level = grid.boundary.copy()
    for m in range(2, n + 1):
        w = grid.line(m)
        level = w - np.minimum.accumulate(w - level)
    return level
