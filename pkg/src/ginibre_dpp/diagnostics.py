"""Statistical checks on sampled configurations."""
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ._random import as_generator
from .configuration import Configuration
from .specfun import gammainc

__all__ = [
    "IntensityProfile",
    "intensity_profile",
    "count_moments",
    "ks_two_sample",
    "thin_configuration",
    "dilate_configuration",
    "chi2_counts",
]


@dataclass(frozen=True)
class IntensityProfile:
    """Points per unit area on concentric annuli, empirical against ``K(x, x)``."""

    edges: np.ndarray
    empirical: np.ndarray
    theoretical: np.ndarray
    counts: np.ndarray
    n_samples: int

    @property
    def areas(self):
        return math.pi * np.diff(self.edges**2)

    @property
    def total_points(self):
        return int(self.counts.sum())

    def rows(self):
        for k in range(self.edges.size - 1):
            yield self.edges[k], self.edges[k + 1], self.empirical[k], self.theoretical[k]


def intensity_profile(samples, spec, nbins=10, edges=None):
    """Annular histogram of the samples normalized by area and sample count.

    The theoretical column is the exact annulus average of
    ``K(x, x) = sum_n lambda_n |phi_n(x)|**2``, i.e.
    ``sum_n lambda_n (F_n(b) - F_n(a)) / area``.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    R = spec.radius * math.sqrt(spec.dilation)
    if edges is None:
        edges = np.linspace(0.0, R, int(nbins) + 1)
    edges = np.asarray(edges, dtype=float)
    radii = np.concatenate([np.abs(_points(s)) for s in samples]) if samples else np.zeros(0)
    if radii.size and radii.max() > R * (1 + 1e-12):
        raise ValueError("sample points outside the disc")
    counts, _ = np.histogram(radii, bins=edges)
    areas = math.pi * np.diff(edges**2)
    empirical = counts / (areas * len(samples))
    # expected mass per annulus, undoing the dilation on the radii
    s2 = (edges / math.sqrt(spec.dilation)) ** 2
    a = spec.degrees[:, None] + 1.0
    cdf = gammainc(a, s2[None, :]) / spec.mass_in_disc[:, None]
    mass = spec.eigenvalues @ np.diff(cdf, axis=1)
    return IntensityProfile(edges, empirical, mass / areas, counts, len(samples))


def _points(sample):
    return sample.points if isinstance(sample, Configuration) else np.asarray(sample)


def count_moments(samples):
    """Sample mean and unbiased variance of the configuration sizes."""
    sizes = np.array([len(_points(s)) for s in samples], dtype=float)
    if sizes.size < 2:
        raise ValueError("need at least two samples")
    return float(sizes.mean()), float(sizes.var(ddof=1))


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 25 or b.size < 25:
        raise ValueError(f"need at least 25 values per sample, got {a.size} and {b.size}")
    res = stats.ks_2samp(a, b, method="asymp")
    return float(res.statistic), float(res.pvalue)


def chi2_counts(observed_sizes, probabilities, min_expected=5.0):
    """Chi-square goodness of fit of observed sizes against a count law.

    Cells with small expected counts are pooled from both tails inward.
    Returns ``(statistic, p_value, degrees_of_freedom)``.
    """
    sizes = np.asarray(observed_sizes, dtype=np.intp)
    probs = np.asarray(probabilities, dtype=float)
    n = sizes.size
    observed = np.bincount(sizes, minlength=probs.size).astype(float)
    if observed.size > probs.size:
        raise ValueError("observed size exceeds the support of the count law")
    expected = probs * n
    cells_o, cells_e = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            cells_o.append(acc_o)
            cells_e.append(acc_e)
            acc_o = acc_e = 0.0
    if cells_e:
        cells_o[-1] += acc_o
        cells_e[-1] += acc_e
    cells_o = np.array(cells_o)
    cells_e = np.array(cells_e)
    dof = cells_o.size - 1
    if dof < 1:
        return 0.0, 1.0, 0
    stat = float(np.sum((cells_o - cells_e) ** 2 / cells_e))
    return stat, float(stats.chi2.sf(stat, dof)), dof


def thin_configuration(xi, p, rng=None):
    """Keep each point independently with probability ``p``."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"retention probability must lie in (0, 1], got {p!r}")
    gen, _ = as_generator(rng)
    pts = _points(xi)
    keep = gen.random(pts.size) < p
    meta = dict(xi.metadata) if isinstance(xi, Configuration) else {}
    return Configuration(pts[keep], meta)


def dilate_configuration(xi, rho):
    """Map every point ``x -> sqrt(rho) x`` (dilation of ratio ``rho`` in the plane)."""
    if not rho > 0:
        raise ValueError(f"dilation ratio must be positive, got {rho!r}")
    meta = dict(xi.metadata) if isinstance(xi, Configuration) else {}
    return Configuration(_points(xi) * math.sqrt(rho), meta)
