"""Active index sets: independent Bernoulli trials on the spectrum."""
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ._random import as_generator
from .specfun import gammainc

__all__ = [
    "ActiveSet",
    "TailMass",
    "sample_active_set",
    "coupled_active_sets",
    "count_distribution",
    "tail_mass",
]


@dataclass(frozen=True)
class ActiveSet:
    """Sorted indices of the eigenfunctions kept by the Bernoulli trials."""

    indices: tuple
    source_seed: Optional[int] = None

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])) or (idx and idx[0] < 0):
            raise ValueError("active indices must be nonnegative and strictly increasing")
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, n):
        return n in set(self.indices)

    def as_array(self):
        return np.asarray(self.indices, dtype=np.intp)


def sample_active_set(spec, rng=None):
    """Draw ``I = {n : U_n <= lambda_n}``.

    Exactly ``spec.n_terms`` uniforms are consumed, in index order, whatever
    the eigenvalues are; this keeps couplings and regression seeds stable.
    """
    gen, seed = as_generator(rng)
    u = gen.random(spec.n_terms)
    return ActiveSet(tuple(np.flatnonzero(u <= spec.eigenvalues)), seed)


def coupled_active_sets(spec_a, spec_b, rng=None):
    """Active sets for two spectra driven by one shared uniform sequence.

    The shorter spectrum is padded with zero eigenvalues.  Index ``n`` differs
    between the two sets with probability ``|lambda_a[n] - lambda_b[n]|``, and
    ``I_b`` is a subset of ``I_a`` whenever ``lambda_b <= lambda_a``.
    """
    gen, seed = as_generator(rng)
    n = max(spec_a.n_terms, spec_b.n_terms)
    lam_a = np.zeros(n)
    lam_b = np.zeros(n)
    lam_a[: spec_a.n_terms] = spec_a.eigenvalues
    lam_b[: spec_b.n_terms] = spec_b.eigenvalues
    u = gen.random(n)
    return (
        ActiveSet(tuple(np.flatnonzero(u <= lam_a)), seed),
        ActiveSet(tuple(np.flatnonzero(u <= lam_b)), seed),
    )


def count_distribution(spec):
    """Law of ``|I|``: coefficients of ``prod_n (1 - lambda_n + lambda_n z)``.

    Returns an array ``p`` of length ``N + 1`` with ``p[k] = P(|I| = k)``.
    """
    probs = np.zeros(spec.n_terms + 1)
    probs[0] = 1.0
    for k, lam in enumerate(spec.eigenvalues):
        # multiply the degree-k polynomial by (1 - lam) + lam z in place
        probs[1 : k + 2] = probs[1 : k + 2] * (1.0 - lam) + probs[: k + 1] * lam
        probs[0] *= 1.0 - lam
    return probs


class TailMass(NamedTuple):
    """``sum_{n >= n0} lambda_n`` split into stored and beyond-truncation parts."""

    stored: float
    remainder: float
    remainder_bound: float

    @property
    def total(self):
        return self.stored + self.remainder


def _eigenvalue_tail(radius, first_degree, scale):
    """``scale * sum_{d >= first_degree} P(d + 1, R**2)``, summed until negligible."""
    x = radius * radius
    total = 0.0
    start = first_degree
    while True:
        deg = np.arange(start, start + 512, dtype=float)
        terms = scale * gammainc(deg + 1.0, x)
        total += float(terms.sum())
        last = terms[-1]
        # terms decay at least geometrically once d > x
        if deg[-1] > x and (last == 0.0 or last < 1e-18 * max(total, 1e-300)):
            return total
        start += 512


def tail_mass(spec, n0):
    """Mass of the eigenvalues with index ``>= n0``.

    ``stored`` sums the stored eigenvalues, ``remainder`` the analytic
    eigenvalues beyond the truncation ``N`` (summed to negligible terms), and
    ``remainder_bound`` is ``sqrt(2/pi) R exp(-c**2)`` (``nan`` when ``R <= c``).
    """
    if n0 < 0:
        raise ValueError(f"n0 must be nonnegative, got {n0}")
    n0 = int(n0)
    stored = float(spec.eigenvalues[n0:].sum())
    first = max(n0, spec.n_terms) + spec.index_offset
    remainder = _eigenvalue_tail(spec.radius, first, spec.thinning)
    R, c = spec.radius, spec.margin
    bound = math.sqrt(2.0 / math.pi) * R * math.exp(-c * c) if R > c else math.nan
    return TailMass(stored, remainder, bound)
