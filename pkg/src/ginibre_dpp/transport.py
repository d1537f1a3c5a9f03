"""Distances between configurations and between samplers, and error bounds.

Costs follow the ``c(x, y) = ||x - y||**2 / 2`` convention: the lifted cost
between two configurations of equal size is half the minimal sum of squared
distances over all pairings, and is infinite when the sizes differ.
"""
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from collections import Counter
from scipy.optimize import linear_sum_assignment
from scipy.special import gammainccinv, gammaincinv, roots_legendre

from ._random import spawn_seeds
from .configuration import Configuration
from .index_sampler import tail_mass
from .specfun import gammaincc

__all__ = [
    "Configuration",
    "Matching",
    "CardinalityMismatchError",
    "tv_config_distance",
    "quadratic_matching_cost",
    "brute_force_matching",
    "radial_w2",
    "kr_truncation_bound",
    "eigenvalue_gap_bound",
    "cardinality_lower_bound",
    "approximation_bound",
    "ApproximationBound",
    "MonteCarloEstimate",
    "estimate_wc_monte_carlo",
    "BRUTE_FORCE_LIMIT",
]

BRUTE_FORCE_LIMIT = 8


class CardinalityMismatchError(ValueError):
    """Configurations of different sizes: the lifted quadratic cost is infinite."""


@dataclass(frozen=True)
class Matching:
    """Pairing ``x[j] <-> y[permutation[j]]`` and its cost ``sum |x - y|^2 / 2``."""

    permutation: tuple
    cost: float


def _points(xi):
    pts = xi.points if isinstance(xi, Configuration) else np.asarray(xi, dtype=complex)
    return np.asarray(pts, dtype=complex).reshape(-1)


def _pair_cost(x, y, perm):
    return 0.5 * float(np.sum(np.abs(x - y[np.asarray(perm, dtype=np.intp)]) ** 2))


def tv_config_distance(xi, zeta, tol=0.0):
    """Size of the symmetric difference ``xi Δ zeta`` of two point multisets.

    With ``tol > 0`` two points count as equal when within ``tol`` of each
    other; the number of equal pairs is then a maximum bipartite matching.
    """
    x, y = _points(xi), _points(zeta)
    if tol <= 0:
        cx, cy = Counter(x.tolist()), Counter(y.tolist())
        common = sum((cx & cy).values())
    elif x.size == 0 or y.size == 0:
        common = 0
    else:
        close = np.abs(x[:, None] - y[None, :]) <= tol
        rows, cols = linear_sum_assignment(~close)
        common = int(close[rows, cols].sum())
    return int(x.size + y.size - 2 * common)


def quadratic_matching_cost(xi, zeta):
    """Optimal pairing for ``c(xi, zeta) = min_sigma sum |x_j - y_sigma(j)|^2 / 2``.

    Raises
    ------
    CardinalityMismatchError
        If the configurations differ in size (the cost is infinite).
    """
    x, y = _points(xi), _points(zeta)
    if x.size != y.size:
        raise CardinalityMismatchError(
            f"cannot pair {x.size} points with {y.size}: lifted cost is infinite"
        )
    if x.size == 0:
        return Matching((), 0.0)
    cost = np.abs(x[:, None] - y[None, :]) ** 2
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(x.size, dtype=np.intp)
    perm[rows] = cols
    return Matching(tuple(int(j) for j in perm), _pair_cost(x, y, perm))


def brute_force_matching(xi, zeta):
    """Exhaustive minimum over all ``n!`` pairings (``n <= 8``); a test oracle."""
    x, y = _points(xi), _points(zeta)
    if x.size != y.size:
        raise CardinalityMismatchError(f"cannot pair {x.size} points with {y.size}")
    if x.size > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT} points, got {x.size}")
    best = None
    for perm in itertools.permutations(range(x.size)):
        c = _pair_cost(x, y, perm)
        if best is None or c < best.cost:
            best = Matching(tuple(perm), c)
    return best


# -- radial transport between exact and ring eigenfunction laws -------------

_GL_NODES = 10_000
_GL_CACHE = {}


def _gauss_legendre_unit(n):
    if n not in _GL_CACHE:
        t, w = roots_legendre(n)
        _GL_CACHE[n] = (0.5 * (t + 1.0), 0.5 * w)
    return _GL_CACHE[n]


def _inverse_gamma_cdf(a, p_target, q_target):
    """``x`` with ``P(a, x) = p_target`` (equivalently ``Q(a, x) = q_target``),
    inverting whichever of P and Q is the small one."""
    return np.where(
        p_target < 0.5, gammaincinv(a, p_target), gammainccinv(a, np.maximum(q_target, 0.0))
    )


def radial_w2(n, spec, basis, nodes=_GL_NODES):
    """Quadratic transport cost between the exact and ring radial laws of ``phi_n``.

    Computes ``int_0^1 |F^{-1}(t) - G^{-1}(t)|^2 dt`` for the quantile
    functions of the densities ``r^(2d+1) e^(-r^2)`` on ``[0, R]`` and on the
    ring of ``n``.  Quantile coupling is optimal in one dimension and the
    angle-preserving lift makes this an upper bound for the planar laws.
    """
    if not 0 <= n < spec.n_terms:
        raise IndexError(f"index {n} outside [0, {spec.n_terms})")
    if basis.mass_deficit[n] == 0.0 and basis.lower[n] == 0.0 and basis.upper[n] >= spec.radius:
        return 0.0
    t, w = _gauss_legendre_unit(nodes)
    t = np.clip(t, 1e-10, 1.0 - 1e-10)
    a = spec.degrees[n] + 1.0
    R2 = spec.radius**2
    full_p = spec.mass_in_disc[n]
    full_q = float(gammaincc(a, R2))
    # exact law: P(a, r^2) = t P(a, R^2)
    s_exact = _inverse_gamma_cdf(a, t * full_p, (1.0 - t) + t * full_q)
    # ring law: P(a, r^2) = P(a, l^2) + t (P(a, u^2) - P(a, l^2))
    p_lo, p_hi = basis.cdf_lower[n], basis.cdf_upper[n]
    q_lo = float(gammaincc(a, basis.lower[n] ** 2))
    q_hi = float(gammaincc(a, basis.upper[n] ** 2))
    s_ring = _inverse_gamma_cdf(a, p_lo + t * (p_hi - p_lo), (1.0 - t) * q_lo + t * q_hi)
    r_exact = np.sqrt(np.minimum(s_exact, R2))
    r_ring = np.sqrt(np.clip(s_ring, basis.lower[n] ** 2, basis.upper[n] ** 2))
    return float(np.sum(w * (r_exact - r_ring) ** 2))


# -- closed-form bounds ------------------------------------------------------


def _require_r_above_c(radius, margin):
    if not radius > margin > 0:
        raise ValueError(f"bound requires R > c > 0, got R={radius!r}, c={margin!r}")


def kr_truncation_bound(radius, margin):
    """``sqrt(2/pi) R exp(-c^2)``: KR distance between the restricted process
    and its truncation to ``(R + c)^2`` eigenfunctions."""
    _require_r_above_c(radius, margin)
    return math.sqrt(2.0 / math.pi) * radius * math.exp(-margin * margin)


def cardinality_lower_bound(radius, margin):
    """``R exp(-c^2) / sqrt(2 pi)`` bounding ``P(|I| < (R - c)^2)``."""
    _require_r_above_c(radius, margin)
    return radius * math.exp(-margin * margin) / math.sqrt(2.0 * math.pi)


def eigenvalue_gap_bound(spec_a, spec_b):
    """``sum_n |lambda_a[n] - lambda_b[n]|``, a KR bound when ``lambda_b <= lambda_a``.

    Raises
    ------
    ValueError
        If ``spec_b`` exceeds ``spec_a`` anywhere by more than ``1e-12``.
    """
    n = max(spec_a.n_terms, spec_b.n_terms)
    lam_a = np.zeros(n)
    lam_b = np.zeros(n)
    lam_a[: spec_a.n_terms] = spec_a.eigenvalues
    lam_b[: spec_b.n_terms] = spec_b.eigenvalues
    excess = float(np.max(lam_b - lam_a)) if n else 0.0
    if excess > 1e-12:
        raise ValueError(f"eigenvalues of the second spectrum exceed the first by {excess:.3e}")
    return float(np.sum(np.abs(lam_a - lam_b)))


class ApproximationBound(NamedTuple):
    """Sum of ``log(1 / mu_n)`` over all stored indices, with per-index terms and
    the ``R^2 exp(-c^2)`` reference scale."""

    total: float
    terms: np.ndarray
    reference_scale: float


def approximation_bound(basis):
    """Worst-case (all indices active) transport cost bound of the ring basis."""
    terms = -np.log1p(-np.asarray(basis.mass_deficit))
    R, c = basis.spectrum.radius, basis.spectrum.margin
    return ApproximationBound(float(terms.sum()), terms, R * R * math.exp(-c * c))


# -- Monte Carlo coupling estimates -----------------------------------------


class MonteCarloEstimate(NamedTuple):
    mean_cost: float
    half_width: float
    mismatch_rate: float
    mismatch_half_width: float
    trials: int
    matched: int


def estimate_wc_monte_carlo(sampler_a, sampler_b, trials, shared_randomness=True, seed=0):
    """Upper estimate of the lifted quadratic distance via an explicit coupling.

    ``sampler_a`` and ``sampler_b`` are callables ``rng -> Configuration``.
    With ``shared_randomness`` both receive generators built from the same
    child seed of ``seed``; otherwise independent ones.  Pairs of unequal size
    are counted in ``mismatch_rate`` and left out of ``mean_cost``; half widths
    are 95% normal-approximation intervals.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    children = spawn_seeds(seed, 2 * trials)
    costs = []
    mismatches = 0
    for k in range(trials):
        seed_a = children[k]
        seed_b = children[k] if shared_randomness else children[trials + k]
        xa = sampler_a(np.random.Generator(np.random.PCG64(seed_a)))
        xb = sampler_b(np.random.Generator(np.random.PCG64(seed_b)))
        if len(xa) != len(xb):
            mismatches += 1
            continue
        costs.append(quadratic_matching_cost(xa, xb).cost)
    costs = np.asarray(costs)
    mean = float(costs.mean()) if costs.size else math.nan
    half = 1.96 * float(costs.std(ddof=1)) / math.sqrt(costs.size) if costs.size > 1 else math.nan
    rate = mismatches / trials
    rate_half = 1.96 * math.sqrt(rate * (1.0 - rate) / trials)
    return MonteCarloEstimate(mean, half, rate, rate_half, trials, int(costs.size))


def spectral_tail(spec, n0):
    """Convenience: total eigenvalue mass from index ``n0`` on (stored + analytic)."""
    return tail_mass(spec, n0).total
