"""Sign environment and coalescing walks on the even/odd sublattices.

Forward walks live on even points ``(i, n)`` (``i + n`` even) and step
``n -> n + xi(i, n)``.  Dual walks live on odd points and run backwards,
``n -> n - xi(i - 1, n)``, reading the same signs.  The two families never
cross.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from . import _rng


class ParityError(ValueError):
    """A point was given on the wrong sublattice."""


class DomainError(ValueError):
    """Arguments outside the domain of an operation."""


class LatticePoint(NamedTuple):
    time: int
    space: int

    @property
    def is_even(self) -> bool:
        return (self.time + self.space) % 2 == 0


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


def require_even(time: int, space: int) -> None:
    if (time + space) % 2:
        raise ParityError(f"({time}, {space}) is not an even lattice point")


def require_odd(time: int, space: int) -> None:
    if (time + space) % 2 == 0:
        raise ParityError(f"({time}, {space}) is not an odd lattice point")


@dataclass(frozen=True, eq=False)
class SignField:
    """The environment xi: a +-1 sign at every even lattice point.

    Signs are computed on demand from ``seed``.  ``overrides`` pins
    individual sites and ``fill`` (when nonzero) pins every other site; both
    exist so tests can force a configuration on a small window.
    """

    seed: int
    overrides: Mapping[tuple[int, int], int] = field(default_factory=dict)
    fill: int = 0

    def __post_init__(self):
        if self.fill not in (-1, 0, 1):
            raise ValueError("fill must be -1, 0 or +1")
        for (i, n), s in self.overrides.items():
            require_even(i, n)
            if s not in (-1, 1):
                raise ValueError(f"override at ({i}, {n}) must be +-1, got {s}")
        object.__setattr__(self, "_key", _rng.stream_key(self.seed, _rng.STREAM_SIGN))

    @classmethod
    def constant(cls, sign: int) -> SignField:
        return cls(seed=0, fill=sign)

    def with_overrides(self, overrides: Mapping[tuple[int, int], int]) -> SignField:
        merged = dict(self.overrides)
        merged.update(overrides)
        return SignField(self.seed, merged, self.fill)

    @property
    def key(self) -> np.uint64:
        return self._key

    def xi(self, i: int, n: int) -> int:
        require_even(i, n)
        return self._xi(i, n)

    def _xi(self, i: int, n: int) -> int:
        # no parity check: internal callers guarantee it
        s = self.overrides.get((i, n))
        if s is not None:
            return s
        if self.fill:
            return self.fill
        return _rng.sign_bit(self._key, i, n)

    def kernel_args(self, i0: int, i1: int, n0: int, n1: int):
        """(key, override box, i0, n0, fill) for the compiled kernels.

        The box covers times ``i0..i1`` and spaces ``n0..n1``; zero entries
        fall through to ``fill`` or the hash.
        """
        box = np.zeros((max(i1 - i0 + 1, 0), max(n1 - n0 + 1, 0)), dtype=np.int8)
        for (i, n), s in self.overrides.items():
            if i0 <= i <= i1 and n0 <= n <= n1:
                box[i - i0, n - n0] = s
        return self._key, box, np.int64(i0), np.int64(n0), np.int64(self.fill)


def xi(field: SignField, p: LatticePoint) -> int:
    return field.xi(p.time, p.space)


@dataclass(frozen=True)
class WalkPath:
    """Space coordinates of one walk at consecutive times.

    ``values[t]`` is the position at ``start.time + t`` for forward paths and
    at ``start.time - t`` for backward ones.
    """

    start: LatticePoint
    direction: Direction
    values: tuple[int, ...]

    @property
    def end_time(self) -> int:
        steps = len(self.values) - 1
        if self.direction is Direction.FORWARD:
            return self.start.time + steps
        return self.start.time - steps

    @property
    def times(self) -> range:
        if self.direction is Direction.FORWARD:
            return range(self.start.time, self.end_time + 1)
        return range(self.start.time, self.end_time - 1, -1)

    def at(self, time: int) -> int:
        offset = time - self.start.time
        if self.direction is Direction.BACKWARD:
            offset = -offset
        if not 0 <= offset < len(self.values):
            raise DomainError(f"time {time} outside path")
        return self.values[offset]


def walk_forward(field: SignField, start: LatticePoint, t_end: int) -> WalkPath:
    require_even(*start)
    if t_end < start.time:
        raise DomainError("t_end precedes the start time")
    n = start.space
    values = [n]
    for i in range(start.time, t_end):
        n += field._xi(i, n)
        values.append(n)
    return WalkPath(LatticePoint(*start), Direction.FORWARD, tuple(values))


def walk_backward(field: SignField, start: LatticePoint, t_end: int) -> WalkPath:
    require_odd(*start)
    if t_end > start.time:
        raise DomainError("t_end is after the start time of a backward walk")
    n = start.space
    values = [n]
    for i in range(start.time, t_end, -1):
        n -= field._xi(i - 1, n)
        values.append(n)
    return WalkPath(LatticePoint(*start), Direction.BACKWARD, tuple(values))
