import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ginibre_dpp import GinibreSampler


def test_params_and_clone():
    est = GinibreSampler(radius=3.0, margin=2.0, mode="ring", random_state=4)
    params = est.get_params()
    assert params["radius"] == 3.0 and params["mode"] == "ring"
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(radius=4.0)
    assert est.radius == 4.0


def test_fit_attributes():
    est = GinibreSampler(radius=5.0, margin=3.0).fit()
    assert est.n_terms_ == 64
    assert est.expected_count_ == pytest.approx(25.0, abs=1e-9)
    assert est.basis_ is None
    assert GinibreSampler(mode="ring").fit().basis_ is not None
    p = est.count_distribution()
    assert p.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(est.intensity(np.array([0j, 1.0])), 1 / np.pi, rtol=1e-8)


@pytest.mark.parametrize(
    "kwargs",
    [dict(radius=-1), dict(margin=0), dict(thinning=2.0), dict(dilation=0),
     dict(tol=1e-3), dict(mode="fast"), dict(radius="5")],
)
def test_validation(kwargs):
    with pytest.raises((ValueError, TypeError)):
        GinibreSampler(**kwargs).fit()


def test_sample_requires_fit():
    with pytest.raises(NotFittedError):
        GinibreSampler().sample()


def test_sample_prefix_reproducible():
    est = GinibreSampler(radius=2.5, margin=2.0, random_state=21).fit()
    three = est.sample(3)
    two = est.sample(2)
    for a, b in zip(two, three):
        np.testing.assert_array_equal(a.points, b.points)
    assert [c.metadata["replication"] for c in three] == [0, 1, 2]
    other = est.sample(1, random_state=22)[0]
    assert not np.array_equal(other.points, three[0].points) or len(other) == 0
