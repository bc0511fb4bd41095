import numpy as np
import pytest
from scipy import stats as sps

from webdistance.stats import ks_distance
from webdistance.tracy_widom import (TABLE_HI, TABLE_LO, TABLE_STEP, TWReference, f2_fredholm,
                                     f2_painleve, tw_reference)
from webdistance.web import DomainError


@pytest.fixture(scope="module")
def ref():
    return tw_reference()


def test_table_shape(ref):
    assert ref.x[0] == TABLE_LO and ref.x[-1] == pytest.approx(TABLE_HI)
    assert np.allclose(np.diff(ref.x), TABLE_STEP)
    assert np.all(np.diff(ref.cdf_values) >= 0)
    assert ref.cdf_values[0] < 1e-6 and ref.cdf_values[-1] > 1 - 1e-6
    assert ref.cdf(-50.0) == 0.0 and ref.cdf(50.0) == 1.0


def test_moments_against_published_values(ref):
    assert ref.mean == pytest.approx(-1.7710868074, abs=1e-8)
    assert ref.sd == pytest.approx(0.9017731382, abs=1e-8)


def test_two_routes_agree():
    s = np.linspace(-7.5, 3.5, 45)
    assert np.max(np.abs(f2_fredholm(s) - f2_painleve(s))) < 1e-8


def test_quadrature_has_converged():
    s = np.linspace(-6, 4, 21)
    assert np.max(np.abs(f2_fredholm(s, nodes=60) - f2_fredholm(s, nodes=120))) < 1e-12


def test_painleve_refuses_far_left():
    with pytest.raises(DomainError):
        f2_painleve([-12.0])


def test_reference_rejects_decreasing_table():
    with pytest.raises(DomainError):
        TWReference(np.array([0.0, 1.0]), np.array([0.6, 0.5]), 0.0, 1.0)


def test_inverse_transform_sampling(ref):
    x = ref.sample(100_000, seed=5)
    assert ks_distance(x, ref) < 0.006
    assert np.array_equal(x, ref.sample(100_000, seed=5))
    assert abs(x.mean() - ref.mean) < 5 * ref.sd / np.sqrt(x.size)


def test_ks_distance_edge_cases(ref):
    x = ref.sample(500, seed=1)
    assert ks_distance(x, x) == 0.0
    c = -1.9
    assert ks_distance(np.full(50, c), ref) == pytest.approx(max(ref.cdf(c), 1 - ref.cdf(c)))
    with pytest.raises(DomainError):
        ks_distance(np.array([]), ref)


def test_ks_against_scipy_reference_distribution():
    # sanity: our wrapper reproduces scipy on a distribution scipy knows
    x = np.random.default_rng(0).normal(size=2000)
    normal = TWReference(np.linspace(-8, 8, 16001), sps.norm.cdf(np.linspace(-8, 8, 16001)), 0.0, 1.0)
    assert ks_distance(x, normal) == pytest.approx(sps.kstest(x, "norm").statistic, abs=1e-6)
