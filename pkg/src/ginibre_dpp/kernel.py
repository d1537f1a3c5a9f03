"""Spectral description of the Ginibre kernel restricted to a disc.

Restricted to ``B_R`` the Ginibre kernel has eigenvalues
``lambda_n = P(n + 1, R**2)`` and eigenfunctions

    phi_n(z) = z**n exp(-|z|**2 / 2) / sqrt(pi * gamma(n + 1, R**2)).

:class:`GinibreSpectrum` keeps the first ``N = ceil((R + c)**2)`` of them,
optionally index-shifted (Palm), scaled (thinning) or followed by a dilation
of the output coordinates.  :class:`RingBasis` replaces each ``phi_n`` by its
restriction to the annulus ``[max(0, min(sqrt n, R) - c), min(R, sqrt n + c)]``,
renormalized to unit mass.
"""
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from .specfun import gammainc, gammaincc, log_gammainc

__all__ = [
    "GinibreSpectrum",
    "RingBasis",
    "build_spectrum",
    "build_ring_basis",
    "eval_eigenfunction",
    "eigenvector",
    "radial_cdf",
    "kernel_value",
    "kernel_diagonal",
    "joint_density",
    "MAX_JOINT_DENSITY_SIZE",
]

MAX_JOINT_DENSITY_SIZE = 12
_LOG_PI = math.log(math.pi)


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GinibreSpectrum:
    """Truncated spectrum of the (possibly Palm / thinned) restricted kernel.

    Attributes
    ----------
    radius, margin : float
        Disc radius ``R`` and truncation margin ``c``.
    eigenvalues : ndarray of shape (N,)
        ``lambda_n`` for the stored indices ``n = 0 .. N-1``.
    index_offset : int
        0 for the plain kernel, 1 for the Palm kernel (``phi_0`` dropped).
    thinning : float
        Retention probability ``p``; eigenvalues carry the factor ``p``.
    dilation : float
        Ratio ``rho``; sampled points are mapped by ``z -> sqrt(rho) z``.
    """

    radius: float
    margin: float
    eigenvalues: np.ndarray
    index_offset: int = 0
    thinning: float = 1.0
    dilation: float = 1.0
    _mass_in_disc: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))
        if self._mass_in_disc is None:
            object.__setattr__(
                self, "_mass_in_disc", _frozen(gammainc(self.degrees + 1.0, self.radius**2))
            )

    @property
    def n_terms(self):
        return int(self.eigenvalues.shape[0])

    @property
    def degrees(self):
        """Polynomial degree of each stored eigenfunction (``n + index_offset``)."""
        return np.arange(self.n_terms) + self.index_offset

    @property
    def mass_in_disc(self):
        """``P(deg + 1, R**2)``: unthinned eigenvalue, also the CDF normalizer."""
        return self._mass_in_disc

    @cached_property
    def log_norm(self):
        """``log(pi * gamma(deg + 1, R**2))`` for each stored index."""
        deg = self.degrees.astype(float)
        return _LOG_PI + gammaln(deg + 1.0) + log_gammainc(deg + 1.0, self.radius**2)

    @property
    def trace(self):
        return float(self.eigenvalues.sum())

    def with_eigenvalues(self, eigenvalues):
        """Same eigenfunctions, different eigenvalues (must keep length ``N``)."""
        eigenvalues = np.asarray(eigenvalues, dtype=float)
        if eigenvalues.shape != self.eigenvalues.shape:
            raise ValueError("eigenvalue array must keep the stored length")
        return GinibreSpectrum(
            self.radius, self.margin, eigenvalues, self.index_offset,
            self.thinning, self.dilation, self._mass_in_disc,
        )

    def truncated(self, n0):
        """Zero every eigenvalue from index ``n0`` on; the length is unchanged so
        coupled samplers keep consuming the same uniforms."""
        lam = np.array(self.eigenvalues)
        lam[int(n0):] = 0.0
        return self.with_eigenvalues(lam)

    def thinned(self, p):
        """Kernel ``p K``: every eigenvalue multiplied by ``p``."""
        _check_probability(p, "thinning")
        out = self.with_eigenvalues(self.eigenvalues * p)
        object.__setattr__(out, "thinning", self.thinning * p)
        return out

    def padded(self, n_terms):
        """Extend with zero eigenvalues up to ``n_terms`` entries."""
        if n_terms <= self.n_terms:
            return self
        lam = np.zeros(n_terms)
        lam[: self.n_terms] = self.eigenvalues
        return GinibreSpectrum(
            self.radius, self.margin, lam, self.index_offset, self.thinning, self.dilation
        )


@dataclass(frozen=True, eq=False)
class RingBasis:
    """Ring-localized eigenfunctions for a spectrum.

    ``lower[n] <= |z| <= upper[n]`` is the support of the approximated
    ``phi_n`` and ``mass[n]`` the fraction of ``|phi_n|**2`` it retains.
    """

    spectrum: GinibreSpectrum
    lower: np.ndarray
    upper: np.ndarray
    mass: np.ndarray
    mass_deficit: np.ndarray  # 1 - mass, without cancellation
    cdf_lower: np.ndarray  # P(deg + 1, lower**2)
    cdf_upper: np.ndarray  # P(deg + 1, upper**2)

    @property
    def radius(self):
        return self.spectrum.radius

    @property
    def n_terms(self):
        return self.spectrum.n_terms

    @property
    def degrees(self):
        return self.spectrum.degrees


def _check_probability(p, name):
    if not (0.0 < p <= 1.0):
        raise ValueError(f"{name} probability must lie in (0, 1], got {p!r}")


def build_spectrum(radius, margin=3.0, palm=False, thinning=1.0, dilation=1.0):
    """Truncated spectrum of the Ginibre kernel restricted to ``B_radius``.

    Parameters
    ----------
    radius : float
        Disc radius ``R > 0``.
    margin : float, default=3.0
        Truncation margin ``c > 0``; ``N = ceil((R + c)**2)`` terms are kept.
    palm : bool, default=False
        Use the Palm kernel (eigenfunction ``phi_0`` removed, indices shifted).
    thinning : float, default=1.0
        Independent retention probability ``p`` in ``(0, 1]``.
    dilation : float, default=1.0
        Dilation ratio ``rho > 0`` applied to sampled coordinates.

    Returns
    -------
    GinibreSpectrum
    """
    radius = float(radius)
    margin = float(margin)
    if not (radius > 0 and math.isfinite(radius)):
        raise ValueError(f"radius must be positive and finite, got {radius!r}")
    if not (margin > 0 and math.isfinite(margin)):
        raise ValueError(f"margin must be positive and finite, got {margin!r}")
    _check_probability(thinning, "thinning")
    if not (dilation > 0 and math.isfinite(dilation)):
        raise ValueError(f"dilation must be positive and finite, got {dilation!r}")
    # tiny slack so that an exact square such as (1 + 1)**2 is not bumped up
    n_terms = int(math.ceil((radius + margin) ** 2 - 1e-9))
    offset = 1 if palm else 0
    degrees = np.arange(n_terms) + offset
    mass = gammainc(degrees + 1.0, radius**2)
    return GinibreSpectrum(
        radius=radius,
        margin=margin,
        eigenvalues=thinning * mass,
        index_offset=offset,
        thinning=float(thinning),
        dilation=float(dilation),
        _mass_in_disc=_frozen(mass),
    )


def build_ring_basis(spec):
    """Ring supports and retained masses for every stored eigenfunction."""
    R = spec.radius
    c = spec.margin
    deg = spec.degrees.astype(float)
    root = np.sqrt(deg)
    lower = np.maximum(0.0, np.minimum(root, R) - c)
    upper = np.minimum(R, root + c)
    a = deg + 1.0
    p_lo = gammainc(a, lower**2)
    p_hi = gammainc(a, upper**2)
    full = spec.mass_in_disc
    mass = np.clip((p_hi - p_lo) / full, 0.0, 1.0)
    # 1 - mass = (P(R^2) - P(u^2) + P(l^2)) / P(R^2) with the difference taken in Q
    deficit = (gammaincc(a, upper**2) - gammaincc(a, R * R) + p_lo) / full
    deficit = np.clip(deficit, 0.0, 1.0)
    return RingBasis(
        spectrum=spec,
        lower=_frozen(lower),
        upper=_frozen(upper),
        mass=_frozen(mass),
        mass_deficit=_frozen(deficit),
        cdf_lower=_frozen(p_lo),
        cdf_upper=_frozen(p_hi),
    )


def _resolve(obj, mode=None):
    """Return ``(spectrum, ring_basis_or_None)`` for a spectrum or ring basis."""
    if isinstance(obj, RingBasis):
        if mode == "exact":
            return obj.spectrum, None
        return obj.spectrum, obj
    if isinstance(obj, GinibreSpectrum):
        if mode == "ring":
            return obj, build_ring_basis(obj)
        return obj, None
    raise TypeError(f"expected GinibreSpectrum or RingBasis, got {type(obj).__name__}")


def eigenvector(obj, positions, z, mode=None):
    """Values ``phi_n(z)`` for stored indices ``positions`` at points ``z``.

    Returns an array of shape ``z.shape + (len(positions),)``; magnitudes are
    assembled in log space so large degrees do not overflow.
    """
    spec, ring = _resolve(obj, mode)
    positions = np.asarray(positions, dtype=np.intp)
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)[..., None]
    theta = np.angle(z)[..., None]
    deg = spec.degrees[positions]
    log_norm = spec.log_norm[positions]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mag = np.where(deg == 0, 0.0, deg * np.log(r)) - 0.5 * r * r - 0.5 * log_norm
    if ring is not None:
        log_mag = log_mag - 0.5 * np.log(ring.mass[positions])
        inside = (r >= ring.lower[positions]) & (r <= ring.upper[positions])
    else:
        inside = r <= spec.radius
    mag = np.where(inside, np.exp(log_mag), 0.0)
    return mag * np.exp(1j * deg * theta)


def eval_eigenfunction(obj, n, z, mode=None):
    """``phi_n(z)`` (index shifted for Palm spectra); zero outside the support.

    Pass a :class:`RingBasis` (or ``mode="ring"``) for the ring approximation.
    """
    spec, _ = _resolve(obj, mode)
    if not 0 <= n < spec.n_terms:
        raise IndexError(f"eigenfunction index {n} outside [0, {spec.n_terms})")
    out = eigenvector(obj, [n], z, mode)[..., 0]
    return complex(out) if out.ndim == 0 else out


def radial_cdf(obj, n, r, mode=None):
    """Probability that a point with density ``|phi_n|**2`` has modulus ``<= r``.

    ``mode="exact"`` gives ``gamma(n+1, r**2) / gamma(n+1, R**2)``; ``"ring"``
    the clamped and renormalized ring version.
    """
    spec, ring = _resolve(obj, mode)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > spec.radius * (1 + 1e-12)):
        raise ValueError(f"radius must lie in [0, {spec.radius}]")
    a = spec.degrees[n] + 1.0
    if ring is None:
        out = gammainc(a, r * r) / spec.mass_in_disc[n]
    else:
        lo, hi = ring.lower[n], ring.upper[n]
        rr = np.clip(r, lo, hi)
        out = (gammainc(a, rr * rr) - ring.cdf_lower[n]) / (ring.cdf_upper[n] - ring.cdf_lower[n])
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def _active_positions(obj, active):
    indices = getattr(active, "indices", active)
    return np.asarray(indices, dtype=np.intp).reshape(-1)


def kernel_value(obj, active, x, y, mode=None):
    """Projection kernel ``sum_{n in I} phi_n(x) conj(phi_n(y))``."""
    pos = _active_positions(obj, active)
    if pos.size == 0:
        return 0j
    vx = eigenvector(obj, pos, x, mode)
    vy = eigenvector(obj, pos, y, mode)
    return complex(np.sum(vx * np.conj(vy)))


def kernel_diagonal(spec, z, basis=None):
    """Intensity ``K(z, z) = sum_n lambda_n |phi_n(z)|**2`` of the full DPP."""
    obj = spec if basis is None else basis
    pos = np.arange(spec.n_terms)
    v = eigenvector(obj, pos, z)
    return np.sum(spec.eigenvalues * np.abs(v) ** 2, axis=-1)


def joint_density(obj, active, points, mode=None):
    """Janossy-type density ``det(K_I(x_k, x_l)) / |I|!`` of a projection DPP."""
    pos = _active_positions(obj, active)
    points = np.asarray(points, dtype=complex).reshape(-1)
    if points.size != pos.size:
        raise ValueError(f"need {pos.size} points for |I| = {pos.size}, got {points.size}")
    if pos.size > MAX_JOINT_DENSITY_SIZE:
        raise ValueError(
            f"|I| = {pos.size} exceeds the direct determinant cap {MAX_JOINT_DENSITY_SIZE}"
        )
    if pos.size == 0:
        return 1.0
    v = eigenvector(obj, pos, points, mode)  # (k, |I|)
    gram = v @ v.conj().T
    det = float(np.linalg.det(gram).real)
    scale = float(np.prod(np.real(np.diag(gram)))) or 1.0
    if det < 0:
        if det < -1e-10 * scale:
            raise ArithmeticError(f"kernel matrix has negative determinant {det}")
        det = 0.0
    return det / math.factorial(pos.size)
