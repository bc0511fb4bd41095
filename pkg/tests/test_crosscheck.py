import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from webdistance import crosscheck as cc
from webdistance.boundary import boundaries, boundary_by_recursion, region_membership
from webdistance.oracle import TargetSpec, Window, distance_field
from webdistance.web import DomainError, LatticePoint, SignField


def cone_sites(lower, upper, columns):
    return [(-d, n) for d in range(1, columns) for n in range(lower - d, upper + d + 1, 2)]


def reference_balls(field, lower, upper, columns, radius=3):
    """Per depth and radius, the oracle ball; also asserts both curve constructions agree."""
    target = TargetSpec.interval(0, lower, upper)
    depth = columns - 1
    df = distance_field(field, target, Window(-depth, 0, lower - 2 * depth - 2, upper + 2 * depth + 2))
    local = boundaries(field, target, radius, horizon=-depth)
    out = []
    for d in range(1, columns):
        row = []
        for k in range(radius + 1):
            rec = boundary_by_recursion(field, target, k, horizon=-depth)
            ball = set()
            for n in range(lower - 2 * depth - 2 + (d + lower) % 2, upper + 2 * depth + 2, 2):
                p = LatticePoint(-d, n)
                inside = df[p] <= k
                assert inside == region_membership(local[k], p) == region_membership(rec, p)
                if inside:
                    ball.add(n)
            row.append(ball)
        out.append(row)
    return out


@given(st.integers(0, 2 ** 40), st.sampled_from([(0, 0), (0, 2), (-2, 2)]))
def test_layered_transition_matches_reference(seed, interval):
    lower, upper = interval
    columns = 7
    f = SignField(seed)
    signs = {site: f.xi(*site) for site in cone_sites(lower, upper, columns)}
    layered = cc.replay_layers(signs, lower, upper, columns)
    assert layered == reference_balls(f, lower, upper, columns)


def test_all_fields_on_four_columns_with_reference_code():
    sites = cone_sites(0, 0, 4)
    assert len(sites) == 9
    for bits in itertools.product((-1, 1), repeat=len(sites)):
        signs = dict(zip(sites, bits))
        f = SignField(0, overrides=signs)
        assert cc.replay_layers(signs, 0, 0, 4) == reference_balls(f, 0, 0, 4)


@pytest.mark.parametrize("lower,upper,columns,sites", [(0, 0, 5, 14), (0, 2, 5, 18), (0, 0, 6, 20)])
def test_exhaustive_small_cones(lower, upper, columns, sites):
    report = cc.exhaustive_crosscheck(lower, upper, columns)
    assert report.configurations == 2 ** sites
    assert report.mismatches == 0 and report.ok


def test_balls_agree_detects_a_moved_curve():
    width, radius = 13, 3
    state = cc._initial_state(width, radius, 6, 6)
    new = np.empty_like(state)
    xi = np.zeros(width, dtype=np.int64)
    xi[5], xi[7] = 1, -1  # both walks step onto the target; r_0 = 8 and 4
    cc._transition(state, xi, width, radius, 5, 7, new)
    assert cc._balls_agree(new, width, radius, 1)
    a_off = width
    broken = new.copy()
    assert new[a_off] == 8 and new[a_off + 1] == 4
    broken[a_off] += 2  # r_0^+ one site too high
    assert not cc._balls_agree(broken, width, radius, 1)
    broken = new.copy()
    broken[5] = 4  # oracle loses a point
    assert not cc._balls_agree(broken, width, radius, 1)


def test_random_crosscheck_small():
    report = cc.random_crosscheck(12, seed=3, size=16)
    assert report.ok and report.configurations == 12
    assert report.as_dict()["ok"]


def test_crosscheck_arguments():
    with pytest.raises(DomainError):
        cc.exhaustive_crosscheck(0, 0, 0)
    with pytest.raises(DomainError):
        cc.random_crosscheck(0, 1)
