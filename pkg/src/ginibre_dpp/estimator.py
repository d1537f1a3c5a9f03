"""scikit-learn style front end for the Ginibre sampler."""
import numbers

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted, check_scalar

from ._random import fresh_seed, spawn_seeds
from .index_sampler import count_distribution, tail_mass
from .kernel import build_ring_basis, build_spectrum, kernel_diagonal
from .projection_sampler import DEFAULT_TOL, sample_ginibre


class GinibreSampler(BaseEstimator):
    """Sampler for the Ginibre DPP restricted to a disc.

    ``fit`` builds the truncated spectrum (and ring basis in ``mode="ring"``);
    ``sample`` draws independent configurations.  ``X`` is ignored: the
    process is fully specified by the parameters.

    Parameters
    ----------
    radius : float, default=5.0
    margin : float, default=3.0
        Truncation margin ``c``; ``ceil((radius + c)**2)`` eigenfunctions are kept.
    mode : {"exact", "ring"}, default="exact"
    palm : bool, default=False
    thinning : float, default=1.0
    dilation : float, default=1.0
    tol : float, default=1e-9
        Tolerance on every inverted CDF value.
    random_state : int or None
        Seed of the replication streams; drawn from entropy when None.

    Attributes
    ----------
    spectrum_ : GinibreSpectrum
    basis_ : RingBasis or None
    n_terms_ : int
    expected_count_ : float
    """

    def __init__(
        self,
        radius=5.0,
        margin=3.0,
        mode="exact",
        palm=False,
        thinning=1.0,
        dilation=1.0,
        tol=DEFAULT_TOL,
        random_state=None,
    ):
        self.radius = radius
        self.margin = margin
        self.mode = mode
        self.palm = palm
        self.thinning = thinning
        self.dilation = dilation
        self.tol = tol
        self.random_state = random_state

    def _validate_params(self):
        check_scalar(self.radius, "radius", numbers.Real, min_val=0, include_boundaries="neither")
        check_scalar(self.margin, "margin", numbers.Real, min_val=0, include_boundaries="neither")
        check_scalar(self.thinning, "thinning", numbers.Real, min_val=0, max_val=1,
                     include_boundaries="right")
        check_scalar(self.dilation, "dilation", numbers.Real, min_val=0,
                     include_boundaries="neither")
        check_scalar(self.tol, "tol", numbers.Real, min_val=0, max_val=1e-6,
                     include_boundaries="right")
        if self.mode not in ("exact", "ring"):
            raise ValueError(f"mode must be 'exact' or 'ring', got {self.mode!r}")

    def fit(self, X=None, y=None):
        self._validate_params()
        self.spectrum_ = build_spectrum(
            self.radius, self.margin, bool(self.palm), self.thinning, self.dilation
        )
        self.basis_ = build_ring_basis(self.spectrum_) if self.mode == "ring" else None
        self.n_terms_ = self.spectrum_.n_terms
        self.expected_count_ = tail_mass(self.spectrum_, 0).stored
        return self

    def sample(self, n_samples=1, random_state=None):
        """Draw ``n_samples`` independent configurations.

        Replication ``k`` uses the ``k``-th child stream of the seed, so any
        prefix of a longer run reproduces a shorter one.
        """
        check_is_fitted(self, "spectrum_")
        seed = random_state if random_state is not None else self.random_state
        if seed is None:
            seed = fresh_seed()
        out = []
        for k, child in enumerate(spawn_seeds(seed, n_samples)):
            config = sample_ginibre(
                self.radius,
                self.margin,
                rng=np.random.Generator(np.random.PCG64(child)),
                mode=self.mode,
                tol=self.tol,
                spectrum=self.spectrum_,
                basis=self.basis_,
            )
            config.metadata.update(seed=int(seed), replication=k)
            out.append(config)
        return out

    def count_distribution(self):
        """Exact law of the number of points, indexed by count."""
        check_is_fitted(self, "spectrum_")
        return count_distribution(self.spectrum_)

    def intensity(self, z):
        """First correlation function ``K(z, z)`` at points ``z`` (before dilation)."""
        check_is_fitted(self, "spectrum_")
        return kernel_diagonal(self.spectrum_, z)
