import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from webdistance import _rng
from webdistance.web import (Direction, DomainError, LatticePoint, ParityError, SignField,
                             walk_backward, walk_forward, xi)

seeds = st.integers(min_value=0, max_value=2 ** 40)


def test_xi_deterministic():
    f = SignField(11)
    p = LatticePoint(4, 6)
    assert xi(f, p) == xi(SignField(11), p) in (-1, 1)


def test_xi_rejects_odd_point():
    with pytest.raises(ParityError):
        xi(SignField(0), LatticePoint(0, 1))


def test_xi_mean_over_a_million_sites():
    key = SignField(2024).key
    t = np.repeat(np.arange(1000), 1000)
    n = np.tile(2 * np.arange(1000) - 1000, 1000) + t % 2
    signs = _rng.signs_at(key, t, n).astype(np.int64)
    assert abs(signs.mean()) < 0.004


def test_field_agrees_with_hashed_signs():
    f = SignField(5)
    t = np.array([0, 3, -7, 10])
    n = np.array([2, 1, -3, -40])
    assert _rng.signs_at(f.key, t, n).tolist() == [f.xi(a, b) for a, b in zip(t, n)]


def test_overrides_and_fill():
    f = SignField(1, overrides={(0, 0): -1}, fill=1)
    assert f.xi(0, 0) == -1 and f.xi(2, 4) == 1
    g = SignField(1).with_overrides({(1, 1): 1, (1, -1): -1})
    assert g.xi(1, 1) == 1 and g.xi(1, -1) == -1
    with pytest.raises(ParityError):
        SignField(0, overrides={(0, 1): 1})
    with pytest.raises(ValueError):
        SignField(0, overrides={(0, 0): 2})
    with pytest.raises(ValueError):
        SignField(0, fill=3)


def test_forced_forward_diagonal():
    path = walk_forward(SignField.constant(1), LatticePoint(0, 0), 4)
    assert path.values == (0, 1, 2, 3, 4)
    assert path.direction is Direction.FORWARD
    assert path.end_time == 4 and path.at(3) == 3


def test_forced_backward_walk():
    path = walk_backward(SignField.constant(1), LatticePoint(0, 1), -3)
    assert path.values == (1, 0, -1, -2)
    assert list(path.times) == [0, -1, -2, -3]
    assert path.at(-2) == -1


@given(seeds)
def test_one_step_definitions(seed):
    f = SignField(seed)
    assert walk_forward(f, LatticePoint(0, 0), 1).values[1] == 0 + f.xi(0, 0)
    assert walk_backward(f, LatticePoint(0, 1), -1).values[1] == 1 - f.xi(-1, 1)


def test_walk_errors():
    f = SignField(0)
    with pytest.raises(ParityError):
        walk_forward(f, LatticePoint(0, 1), 3)
    with pytest.raises(DomainError):
        walk_forward(f, LatticePoint(2, 0), 1)
    with pytest.raises(ParityError):
        walk_backward(f, LatticePoint(0, 0), -3)
    with pytest.raises(DomainError):
        walk_backward(f, LatticePoint(0, 1), 2)
    with pytest.raises(DomainError):
        walk_forward(f, LatticePoint(0, 0), 2).at(5)


@given(seeds, st.integers(-10, 10), st.integers(-10, 10))
def test_paths_are_unit_steps_on_their_sublattice(seed, a, b):
    f = SignField(seed)
    fwd = walk_forward(f, LatticePoint(0, 2 * a), 20)
    bwd = walk_backward(f, LatticePoint(0, 2 * b + 1), -20)
    for path in (fwd, bwd):
        assert np.all(np.abs(np.diff(path.values)) == 1)
    assert all((t + x) % 2 == 0 for t, x in zip(fwd.times, fwd.values))
    assert all((t + x) % 2 == 1 for t, x in zip(bwd.times, bwd.values))


@given(seeds, st.integers(-6, 6), st.integers(-6, 6))
def test_forward_coalescence(seed, a, b):
    f = SignField(seed)
    p = walk_forward(f, LatticePoint(0, 2 * a), 40).values
    q = walk_forward(f, LatticePoint(0, 2 * b), 40).values
    met = [t for t in range(41) if p[t] == q[t]]
    if met:
        assert p[met[0]:] == q[met[0]:]


@given(seeds, st.integers(-6, 6), st.integers(-6, 6))
def test_backward_coalescence(seed, a, b):
    f = SignField(seed)
    p = walk_backward(f, LatticePoint(0, 2 * a + 1), -40).values
    q = walk_backward(f, LatticePoint(0, 2 * b + 1), -40).values
    met = [t for t in range(41) if p[t] == q[t]]
    if met:
        assert p[met[0]:] == q[met[0]:]


def test_walks_are_pure_functions_of_seed_and_start():
    a = walk_forward(SignField(77), LatticePoint(3, 5), 60)
    b = walk_forward(SignField(77), LatticePoint(3, 5), 60)
    assert a == b


def test_increment_frequency():
    ups = 0
    total = 0
    for seed in range(200):
        v = walk_forward(SignField(seed), LatticePoint(0, 0), 50).values
        ups += sum(np.diff(v) > 0)
        total += 50
    sigma = 0.5 / np.sqrt(total)
    assert abs(ups / total - 0.5) < 3 * sigma


def _noncrossing_all_fields(size):
    """Every forward/dual path pair on a size x size window, for all window fields.

    Signs on the window's even sites at times 0..size-2 are enumerated;
    sites outside are hashed from a fixed seed.  Vectorized over fields.
    """
    times = range(size - 1)
    sites = [(t, n) for t in times for n in range(size) if (t + n) % 2 == 0]
    n_fields = 2 ** len(sites)
    lo, hi = -size, 2 * size
    outside = SignField(123)
    grid = np.empty((n_fields, size, hi - lo + 1), dtype=np.int64)
    for t in range(size):
        for n in range(lo, hi + 1):
            if (t + n) % 2 == 0:
                grid[:, t, n - lo] = outside._xi(t, n)
    idx = np.arange(n_fields)
    for q, (t, n) in enumerate(sites):
        grid[:, t, n - lo] = np.where((idx >> q) & 1, 1, -1)

    def forward(t0, n0):
        out = np.full((n_fields, size), np.nan)
        pos = np.full(n_fields, n0)
        out[:, t0] = pos
        for t in range(t0, size - 1):
            pos = pos + grid[idx, t, pos - lo]
            out[:, t + 1] = pos
        return out

    def backward(t0, n0):
        out = np.full((n_fields, size), np.nan)
        pos = np.full(n_fields, n0)
        out[:, t0] = pos
        for t in range(t0, 0, -1):
            pos = pos - grid[idx, t - 1, pos - lo]
            out[:, t - 1] = pos
        return out

    fwd = [forward(t, n) for t in range(size) for n in range(size) if (t + n) % 2 == 0]
    bwd = [backward(t, n) for t in range(size) for n in range(size) if (t + n) % 2 == 1]
    flips = 0
    for a, b in itertools.product(fwd, bwd):
        diff = np.sign(a - b)  # nan outside the common time range
        both = ~np.isnan(diff)
        assert not np.any(diff[both] == 0)
        hi_sign = np.where(both, diff, 0)
        flips += int(np.sum(np.any(hi_sign > 0, axis=1) & np.any(hi_sign < 0, axis=1)))
    return n_fields, flips


def test_forward_and_dual_paths_never_cross_exhaustive_6x6():
    n_fields, flips = _noncrossing_all_fields(6)
    assert n_fields == 2 ** 15
    assert flips == 0
