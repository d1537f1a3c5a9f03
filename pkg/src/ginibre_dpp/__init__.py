"""Fast simulation of the Ginibre determinantal point process on a disc.

Points are drawn by inverse transform sampling of modulus and argument,
with optional ring-localized eigenfunctions for large configurations, and
the accuracy of the approximations is quantified with transport distances
and closed-form bounds.
"""
from .configuration import Configuration
from .diagnostics import (
    IntensityProfile,
    count_moments,
    dilate_configuration,
    intensity_profile,
    ks_two_sample,
    thin_configuration,
)
from .estimator import GinibreSampler
from .exceptions import NumericalDegeneracyError, RejectionLimitError
from .index_sampler import (
    ActiveSet,
    coupled_active_sets,
    count_distribution,
    sample_active_set,
    tail_mass,
)
from .kernel import (
    GinibreSpectrum,
    RingBasis,
    build_ring_basis,
    build_spectrum,
    eval_eigenfunction,
    joint_density,
    kernel_value,
    radial_cdf,
)
from .projection_sampler import (
    sample_ginibre,
    sample_projection_dpp,
    sample_rejection,
)
from .transport import (
    approximation_bound,
    brute_force_matching,
    cardinality_lower_bound,
    eigenvalue_gap_bound,
    estimate_wc_monte_carlo,
    kr_truncation_bound,
    quadratic_matching_cost,
    radial_w2,
    tv_config_distance,
)

__version__ = "0.1.0"
