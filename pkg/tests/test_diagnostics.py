import math

import numpy as np
import pytest
from scipy import stats

from ginibre_dpp.configuration import Configuration
from ginibre_dpp.diagnostics import (
    chi2_counts,
    count_moments,
    dilate_configuration,
    intensity_profile,
    ks_two_sample,
    thin_configuration,
)
from ginibre_dpp.kernel import build_spectrum, kernel_diagonal
from ginibre_dpp.projection_sampler import sample_ginibre


def test_configuration_validation():
    with pytest.raises(ValueError):
        Configuration(np.array([np.nan]))
    c = Configuration([1j, -2.0])
    assert len(c) == 2
    np.testing.assert_allclose(c.radii, [1, 2])
    np.testing.assert_allclose(c.angles, [math.pi / 2, math.pi])
    d = c.copy(seed=3)
    assert d.metadata == {"seed": 3} and d.points is not c.points


def test_theoretical_intensity_is_annulus_average():
    spec = build_spectrum(4.0, 3.0)
    prof = intensity_profile([np.zeros(0)], spec, nbins=4)
    # midpoint-free check: integrate K(x, x) over each annulus numerically
    for lo, hi, _, th in prof.rows():
        r = np.linspace(lo, hi, 2001)
        k = kernel_diagonal(spec, r.astype(complex))
        integral = np.trapezoid(2 * np.pi * r * k, r)
        assert th == pytest.approx(integral / (math.pi * (hi**2 - lo**2)), rel=1e-5)
    assert prof.total_points == 0
    total = np.sum(prof.theoretical * prof.areas)
    assert total == pytest.approx(spec.trace, rel=1e-12)


def test_intensity_profile_counts():
    spec = build_spectrum(2.0, 3.0)
    samples = [Configuration([0.1, 1.5j]), Configuration([-1.9 + 0j])]
    prof = intensity_profile(samples, spec, nbins=2)
    assert prof.counts.tolist() == [1, 2]
    assert prof.empirical[0] == pytest.approx(1 / (math.pi * 1 * 2))
    with pytest.raises(ValueError):
        intensity_profile([Configuration([3.0])], spec)
    with pytest.raises(ValueError):
        intensity_profile([], spec)


def test_intensity_profile_dilated_edges():
    spec = build_spectrum(2.0, 3.0, dilation=4.0)
    prof = intensity_profile([Configuration([3.9])], spec, nbins=4)
    assert prof.edges[-1] == pytest.approx(4.0)
    assert np.sum(prof.theoretical * prof.areas) == pytest.approx(spec.trace, rel=1e-12)


def test_count_moments():
    mean, var = count_moments([np.zeros(2), np.zeros(4)])
    assert (mean, var) == (3.0, 2.0)
    with pytest.raises(ValueError):
        count_moments([np.zeros(2)])


def test_ks_two_sample():
    gen = np.random.default_rng(0)
    a, b = gen.normal(size=500), gen.normal(size=500)
    stat, p = ks_two_sample(a, b)
    ref = stats.ks_2samp(a, b, method="asymp")
    assert stat == pytest.approx(ref.statistic) and p == pytest.approx(ref.pvalue)
    assert ks_two_sample(a, b + 1)[1] < 1e-10
    with pytest.raises(ValueError):
        ks_two_sample(a[:10], b)


def test_chi2_counts_pooling():
    probs = np.array([0.001, 0.2, 0.598, 0.2, 0.001])
    sizes = [1] * 20 + [2] * 60 + [3] * 20
    stat, p, dof = chi2_counts(sizes, probs)
    # first cell pooled into the second, last into the fourth
    assert dof == 2
    assert stat == pytest.approx((20 - 20.1) ** 2 / 20.1 + (60 - 59.8) ** 2 / 59.8
                                 + (20 - 20.1) ** 2 / 20.1)
    assert chi2_counts([0, 0, 0], [1.0])[2] == 0
    with pytest.raises(ValueError):
        chi2_counts([7], probs)


def test_thin_and_dilate():
    xi = Configuration(np.arange(1000) * 1j, {"seed": 1})
    kept = thin_configuration(xi, 0.3, 4)
    assert abs(len(kept) - 300) < 60
    assert set(kept.points.tolist()) <= set(xi.points.tolist())
    assert len(thin_configuration(xi, 1.0, 4)) == 1000
    with pytest.raises(ValueError):
        thin_configuration(xi, 0.0)
    big = dilate_configuration(xi, 4.0)
    np.testing.assert_allclose(big.points, 2 * xi.points)
    with pytest.raises(ValueError):
        dilate_configuration(xi, -1)


def test_thinned_sampler_matches_thinning_in_law():
    # thinning the eigenvalues and thinning the points give the same count law
    gen = np.random.default_rng(12)
    direct = [len(sample_ginibre(3.0, 2.0, rng=gen, thinning=0.5)) for _ in range(300)]
    after = [len(thin_configuration(sample_ginibre(3.0, 2.0, rng=gen), 0.5, gen))
             for _ in range(300)]
    assert stats.mannwhitneyu(direct, after).pvalue > 1e-3
    lam = 0.5 * build_spectrum(3.0, 2.0).eigenvalues
    se = math.sqrt(np.sum(lam * (1 - lam)) / 300)
    assert abs(np.mean(direct) - lam.sum()) <= 4 * se
