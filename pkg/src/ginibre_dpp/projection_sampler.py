"""Point locations of a projection DPP with radially separable eigenfunctions.

Given the active set ``I``, points are drawn one at a time.  For step ``i``
the conditional density is ``v(z)^* V_i v(z) / (|I| - i + 1)`` where
``v(z) = (phi_n(z))_{n in I}`` and ``V_i = Id - sum_{k<i} e_k e_k^*`` is the
projector orthogonal to the Gram-Schmidt frame of the previous points.

Because ``phi_n(r e^{i t}) = g_n(r) e^{i n t}``, the radial marginal of that
density is ``sum_n U_i[n] F_n(r)`` with ``U_i = diag(V_i)`` and ``F_n`` the
radial CDF of ``|phi_n|**2``, and the angular CDF at fixed radius is a short
trigonometric sum whose coefficients are sums of ``V_i`` along index
differences.  Both are inverted by safeguarded Newton/bisection.

``V_i`` is stored as an upper skyline (row ``p`` holds ``V[p, p:p + w_p]``).
With the exact eigenfunctions ``w_p`` spans the whole row; with the ring
basis only pairs of indices whose rings overlap are ever read, which is what
makes the per-point update and draw cheaper.
"""
import math
import time

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import gammaincinv, gammainccinv

from ._random import as_generator
from .configuration import Configuration
from .exceptions import NumericalDegeneracyError, RejectionLimitError
from .index_sampler import ActiveSet, sample_active_set
from .kernel import _resolve, build_ring_basis, build_spectrum, eigenvector
from .specfun import gammainc

__all__ = [
    "SamplerState",
    "RadialSystem",
    "AngularSystem",
    "sample_projection_dpp",
    "draw_radius",
    "draw_angle",
    "gram_schmidt_update",
    "conditional_density",
    "sample_rejection",
    "sample_ginibre",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-9
TWO_PI = 2.0 * math.pi
_DEGENERACY = 1e-12
_MONOTONE_SLACK = 1e-9
# solve to a tenth of the tolerance so independent re-evaluation stays inside it
_SOLVE_FRACTION = 0.1


def _check_tol(tol):
    if not (0.0 < tol <= 1e-6):
        raise ValueError(f"tolerance must lie in (0, 1e-6], got {tol!r}")


class SamplerState:
    """Running state of one projection-DPP draw.

    Attributes
    ----------
    step : int
        Index (1-based) of the next point to draw.
    frame : ndarray of shape (|I|, |I|)
        Rows ``0 .. step-2`` hold the orthonormal vectors ``e_k``.
    radial_weights : ndarray of shape (|I|,)
        ``U_i``, the diagonal of ``V_i``.
    band : ndarray of shape (|I|, W)
        Skyline storage of ``V_i``: ``band[p, j] = V[p, p + j]`` for
        ``j < band_width[p]``.  Entries past ``band_width`` are scratch.
    """

    def __init__(self, basis, active, mode=None, tol=DEFAULT_TOL):
        _check_tol(tol)
        spec, ring = _resolve(basis, mode)
        self.spec = spec
        self.ring = ring
        self.basis = ring if ring is not None else spec
        self.mode = "exact" if ring is None else "ring"
        self.tol = float(tol)
        self.active = active if isinstance(active, ActiveSet) else ActiveSet(tuple(active))
        pos = self.active.as_array()
        if pos.size and pos[-1] >= spec.n_terms:
            raise IndexError("active index beyond the stored spectrum")
        m = pos.size
        self.positions = pos
        self.size = m
        self.degrees = spec.degrees[pos]
        self.step = 1
        self.frame = np.zeros((m, m), dtype=complex)
        self.radial_weights = np.ones(m)
        self.log_norm = np.array(spec.log_norm[pos])
        if ring is None:
            self.cdf_lower = np.zeros(m)
            self.cdf_upper = np.array(spec.mass_in_disc[pos])
            self.lower = np.zeros(m)
            self.upper = np.full(m, spec.radius)
            last = np.full(m, m - 1)
        else:
            self.cdf_lower = np.array(ring.cdf_lower[pos])
            self.cdf_upper = np.array(ring.cdf_upper[pos])
            self.lower = np.array(ring.lower[pos])
            self.upper = np.array(ring.upper[pos])
            self.log_norm += np.log(ring.mass[pos])
            # rings p <= q overlap iff lower[q] <= upper[p]; lower is sorted
            last = np.searchsorted(self.lower, self.upper, side="right") - 1
        self.band_width = np.maximum(last - np.arange(m) + 1, 1)
        width = int(self.band_width.max()) if m else 1
        self.band = np.zeros((m, width), dtype=complex)
        if m:
            self.band[:, 0] = 1.0
        cols = np.arange(width)
        self._valid = cols[None, :] < self.band_width[:, None]
        deg_pad = np.concatenate([self.degrees, np.zeros(width, dtype=self.degrees.dtype)])
        diff = sliding_window_view(deg_pad, width)[:m] - self.degrees[:, None]
        self._diff = np.where(self._valid, diff, 0)
        self._cum_weights = None
        self.last_update_time = 0.0
        self.residuals = []
        self.timings = []

    # -- views --------------------------------------------------------------

    @property
    def remaining(self):
        """``|I| - i + 1``: number of points still to draw, current one included."""
        return self.size - self.step + 1

    def to_dense(self):
        """``V_i`` as a dense Hermitian matrix (entries outside the band are 0)."""
        m = self.size
        out = np.zeros((m, m), dtype=complex)
        for p in range(m):
            w = int(self.band_width[p])
            out[p, p : p + w] = self.band[p, :w]
            out[p + 1 : p + w, p] = np.conj(self.band[p, 1:w])
        return out

    def radial_cumsum(self):
        if self._cum_weights is None:
            self._cum_weights = np.concatenate([[0.0], np.cumsum(self.radial_weights)])
        return self._cum_weights

    def window(self, r):
        """Positions ``[lo, hi)`` whose support contains radius ``r`` and the
        number ``done`` of positions whose support lies entirely below ``r``."""
        if self.ring is None:
            return 0, self.size, 0
        done = int(np.searchsorted(self.upper, r, side="right"))
        lo = int(np.searchsorted(self.upper, r, side="left"))
        hi = int(np.searchsorted(self.lower, r, side="right"))
        return lo, hi, done

    def log_magnitude(self, sl, r):
        deg = self.degrees[sl]
        with np.errstate(divide="ignore"):
            log_r = math.log(r) if r > 0 else -math.inf
        lead = np.where(deg == 0, 0.0, deg * log_r)
        return lead - 0.5 * r * r - 0.5 * self.log_norm[sl]

    # -- step A -------------------------------------------------------------

    def subtract_rank_one(self, e):
        """``U -= |e|**2`` and ``V -= e e^*`` on the stored skyline."""
        m = self.size
        width = self.band.shape[1]
        self.radial_weights -= (e * np.conj(e)).real
        e_pad = np.concatenate([e, np.zeros(width, dtype=complex)])
        win = sliding_window_view(e_pad, width)[:m]
        self.band -= e[:, None] * np.conj(win)
        self._cum_weights = None


class RadialSystem:
    """Radial CDF ``S_i(r) / S_i(R)`` with ``S_i(r) = sum_n U_i[n] F_n(r)``."""

    def __init__(self, state):
        self.state = state
        self.total = float(state.radial_weights.sum())

    def __call__(self, r):
        """Normalized CDF value and its derivative at radius ``r``."""
        st = self.state
        lo, hi, done = st.window(r)
        sl = slice(done, hi)
        base = st.radial_cumsum()[done] if done else 0.0
        if hi <= done:
            return base / self.total, 0.0
        a = st.degrees[sl] + 1.0
        low = st.cdf_lower[sl]
        cdf = (gammainc(a, r * r) - low) / (st.cdf_upper[sl] - low)
        np.clip(cdf, 0.0, 1.0, out=cdf)
        weights = st.radial_weights[sl]
        value = base + float(weights @ cdf)
        # d/dr F_n = 2 pi r |phi_n(r)|^2 inside the support
        dens = np.exp(2.0 * st.log_magnitude(sl, r))
        if st.ring is not None:
            dens[(r < st.lower[sl]) | (r > st.upper[sl])] = 0.0
        deriv = TWO_PI * r * float(weights @ dens)
        return value / self.total, deriv / self.total

    def unnormalized(self, r):
        return self(r)[0] * self.total


class AngularSystem:
    """Angular CDF at a fixed radius.

    ``Q(r, a) / r = a C_0 + 2 sum_{d>0} Re(C_d (e^{i d a} - 1) / (i d))`` with
    ``C_d = sum_{deg_q - deg_p = d} V[p, q] g_p(r) g_q(r)``.
    """

    def __init__(self, state, r):
        self.state = state
        self.radius = r
        lo, hi, _ = state.window(r)
        coeffs = np.zeros(1, dtype=complex)
        if hi > lo:
            n = hi - lo
            width = min(state.band.shape[1], n)
            g = np.exp(state.log_magnitude(slice(lo, hi), r))
            if state.ring is not None:
                g[(r < state.lower[lo:hi]) | (r > state.upper[lo:hi])] = 0.0
            g_pad = np.concatenate([g, np.zeros(width)])
            g_win = sliding_window_view(g_pad, width)[:n]
            cols = np.arange(width)
            keep = state._valid[lo:hi, :width] & (cols[None, :] < (n - np.arange(n))[:, None])
            weights = (state.band[lo:hi, :width] * (g[:, None] * g_win))[keep]
            diffs = state._diff[lo:hi, :width][keep]
            coeffs = np.bincount(diffs, weights.real) + 1j * np.bincount(diffs, weights.imag)
        self.diag = float(coeffs[0].real)
        nz = np.flatnonzero(coeffs[1:]) + 1
        self.freqs = nz.astype(float)
        self.re = coeffs[nz].real
        self.im = coeffs[nz].imag

    @property
    def total(self):
        """``Q(r, 2 pi) / r``."""
        return TWO_PI * self.diag

    def __call__(self, alpha):
        """Normalized CDF value and derivative at angle ``alpha``."""
        k = self.freqs
        s = np.sin(k * alpha)
        c = np.cos(k * alpha)
        value = alpha * self.diag + 2.0 * float(np.sum((self.re * s - self.im * (1.0 - c)) / k))
        deriv = self.diag + 2.0 * float(np.sum(self.re * c - self.im * s))
        total = self.total
        return value / total, deriv / total


def _invert_cdf(fn, target, lo, hi, ftol, xtol):
    """Solve ``fn(x)[0] = target`` on ``[lo, hi]`` for a nondecreasing CDF.

    Newton steps are taken inside the bracket and replaced by bisection when
    they leave it or fail to halve the residual.  Returns ``(x, residual)``.
    """
    f_lo, f_hi = 0.0, 1.0
    x = lo + (hi - lo) * target
    best = (x, math.inf)
    prev_res = math.inf
    for _ in range(200):
        f, df = fn(x)
        if f < f_lo - _MONOTONE_SLACK or f > f_hi + _MONOTONE_SLACK:
            raise NumericalDegeneracyError(
                f"CDF not monotone: value {f!r} outside [{f_lo!r}, {f_hi!r}] at {x!r}"
            )
        res = f - target
        if abs(res) < abs(best[1]):
            best = (x, res)
        if abs(res) <= ftol:
            return x, res
        if res < 0:
            lo, f_lo = x, f
        else:
            hi, f_hi = x, f
        if hi - lo <= xtol:
            return best
        use_newton = df > 0 and abs(res) <= 0.5 * abs(prev_res)
        prev_res = res
        x_new = x - res / df if use_newton else math.nan
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        x = x_new
    return best


def draw_radius(state, radial, rng):
    """Draw the modulus of the next point by inverting the radial CDF."""
    gen, _ = as_generator(rng)
    target = gen.random()
    R = state.spec.radius
    r, res = _invert_cdf(radial, target, 0.0, R, _SOLVE_FRACTION * state.tol, 1e-12 * R)
    return r, target, res


def draw_angle(state, angular, r, rng):
    """Draw the argument of the next point at modulus ``r``."""
    gen, _ = as_generator(rng)
    target = gen.random()
    if not angular.diag > 0.0:
        raise NumericalDegeneracyError(f"no angular mass at radius {r!r}")
    alpha, res = _invert_cdf(
        angular, target, 0.0, TWO_PI, _SOLVE_FRACTION * state.tol, 1e-12 * TWO_PI
    )
    return alpha % TWO_PI, target, res


def gram_schmidt_update(state, point, basis=None):
    """Append the normalized component of ``phi_I(point)`` orthogonal to the
    current frame and subtract its projector from ``U`` and ``V``.

    Classical Gram-Schmidt applied twice, which keeps the frame orthonormal to
    working precision.
    """
    k = state.step - 1
    v = eigenvector(state.basis if basis is None else basis, state.positions, point)
    u = v
    if k:
        frame = state.frame[:k]
        for _ in range(2):
            u = u - (frame.conj() @ u) @ frame
    norm = float(np.linalg.norm(u))
    if norm < _DEGENERACY:
        raise NumericalDegeneracyError(
            f"Gram-Schmidt residual {norm:.3e} at step {state.step}: point lies in the span"
        )
    e = u / norm
    state.frame[k] = e
    t0 = time.perf_counter()
    state.subtract_rank_one(e)
    state.last_update_time = time.perf_counter() - t0
    state.step += 1
    return state


def conditional_density(state, basis, z):
    """Density of the next point: ``(|v|^2 - sum_k |<e_k, v>|^2) / (|I| - i + 1)``."""
    z = np.asarray(z, dtype=complex)
    v = eigenvector(basis if basis is not None else state.basis, state.positions, z)
    k = state.step - 1
    total = np.sum(np.abs(v) ** 2, axis=-1)
    if k:
        proj = v @ state.frame[:k].conj().T
        total = total - np.sum(np.abs(proj) ** 2, axis=-1)
    out = total / state.remaining
    if np.any(out < -1e-10):
        raise NumericalDegeneracyError(f"negative conditional density {np.min(out)!r}")
    return np.maximum(out, 0.0)


def sample_projection_dpp(basis, active, rng=None, mode=None, tol=DEFAULT_TOL):
    """Draw the ``|I|`` points of the projection DPP with eigenfunctions ``I``.

    Parameters
    ----------
    basis : GinibreSpectrum or RingBasis
        Eigenfunctions; a ring basis (or ``mode="ring"``) uses the
        ring-localized approximation.
    active : ActiveSet or sequence of int
    rng : int, Generator or None
    mode : {"exact", "ring"}, optional
    tol : float, default=1e-9
        Tolerance on the CDF values of every inverted coordinate.

    Returns
    -------
    Configuration
        Points in drawing order; metadata holds the inversion residuals and
        per-step timings (seconds) of the update (A), draw (B) and
        Gram-Schmidt (C) phases.
    """
    gen, seed = as_generator(rng)
    state = SamplerState(basis, active, mode, tol)
    m = state.size
    points = np.zeros(m, dtype=complex)
    pending_a = 0.0
    for i in range(m):
        t0 = time.perf_counter()
        radial = RadialSystem(state)
        r, _, res_r = draw_radius(state, radial, gen)
        angular = AngularSystem(state, r)
        alpha, _, res_a = draw_angle(state, angular, r, gen)
        w = r * complex(math.cos(alpha), math.sin(alpha))
        t1 = time.perf_counter()
        points[i] = w
        state.residuals.append((res_r, res_a))
        if i < m - 1:
            t2 = time.perf_counter()
            gram_schmidt_update(state, w)
            t_update = state.last_update_time
            t_c = time.perf_counter() - t2 - t_update
        else:
            t_update = t_c = 0.0
        state.timings.append((pending_a, t1 - t0, t_c))
        pending_a = t_update
    return Configuration(
        points,
        {
            "mode": state.mode,
            "seed": seed,
            "n_points": m,
            "residuals": np.array(state.residuals).reshape(-1, 2),
            "timings": np.array(state.timings).reshape(-1, 3),
        },
    )


def _proposal_point(spec, degrees, mass, gen):
    """One draw from ``|phi_I|^2 / |I|`` as a uniform mixture of the ``|phi_n|^2``."""
    p = int(gen.integers(degrees.size))
    a = degrees[p] + 1.0
    u = gen.random()
    target = u * mass[p]
    if target < 0.5:
        s = gammaincinv(a, target)
    else:
        s = gammainccinv(a, 1.0 - target)
    r = min(math.sqrt(s), spec.radius)
    theta = TWO_PI * gen.random()
    return r * complex(math.cos(theta), math.sin(theta))


def sample_rejection(spec, active, rng=None, max_proposals=10**6):
    """Reference sampler: sequential rejection from ``|phi_I|^2 / |I|``.

    At step ``i`` a proposal ``x`` is accepted with probability
    ``(|v|^2 - sum_k |<e_k, v>|^2) / |v|^2``, which equals the ratio of the
    target density to its envelope ``|v|^2 / (|I| - i + 1)``.  Meant as an
    oracle for small ``|I|`` (at most 64).
    """
    spec, _ = _resolve(spec, "exact")
    active = active if isinstance(active, ActiveSet) else ActiveSet(tuple(active))
    pos = active.as_array()
    m = pos.size
    if m > 64:
        raise ValueError(f"rejection sampler is limited to |I| <= 64, got {m}")
    gen, seed = as_generator(rng)
    degrees = spec.degrees[pos]
    mass = spec.mass_in_disc[pos]
    frame = np.zeros((m, m), dtype=complex)
    points = np.zeros(m, dtype=complex)
    rejections = np.zeros(m, dtype=np.int64)
    for i in range(m):
        count = 0
        while True:
            z = _proposal_point(spec, degrees, mass, gen)
            v = eigenvector(spec, pos, z)
            norm2 = float(np.vdot(v, v).real)
            resid = norm2 - float(np.sum(np.abs(frame[:i].conj() @ v) ** 2)) if i else norm2
            if norm2 > 0 and gen.random() * norm2 <= resid:
                break
            count += 1
            if count >= max_proposals:
                raise RejectionLimitError(
                    f"point {i + 1}: {count} proposals rejected", rejections=count
                )
        rejections[i] = count
        points[i] = z
        u = v
        for _ in range(2):
            u = u - (frame[:i].conj() @ u) @ frame[:i]
        norm = float(np.linalg.norm(u))
        if norm < _DEGENERACY:
            raise NumericalDegeneracyError(f"Gram-Schmidt residual {norm:.3e} at step {i + 1}")
        frame[i] = u / norm
    return Configuration(
        points, {"mode": "rejection", "seed": seed, "n_points": m, "rejections": rejections}
    )


def sample_ginibre(
    radius,
    margin=3.0,
    rng=None,
    mode="exact",
    palm=False,
    thinning=1.0,
    dilation=1.0,
    tol=DEFAULT_TOL,
    spectrum=None,
    basis=None,
):
    """One configuration of the (Palm / thinned / dilated) Ginibre DPP on a disc.

    Active set first (``N`` uniforms), then the projection draw.  A prebuilt
    ``spectrum`` / ``basis`` may be passed to skip rebuilding them.
    """
    if mode not in ("exact", "ring"):
        raise ValueError(f"mode must be 'exact' or 'ring', got {mode!r}")
    gen, seed = as_generator(rng)
    if spectrum is None:
        spectrum = build_spectrum(radius, margin, palm, thinning, dilation)
    if mode == "ring" and basis is None:
        basis = build_ring_basis(spectrum)
    active = sample_active_set(spectrum, gen)
    config = sample_projection_dpp(basis if mode == "ring" else spectrum, active, gen, mode, tol)
    if spectrum.dilation != 1.0:
        config.points = config.points * math.sqrt(spectrum.dilation)
    config.metadata.update(
        {
            "seed": seed,
            "radius": spectrum.radius,
            "margin": spectrum.margin,
            "active_size": len(active),
            "variant": {
                "palm": bool(spectrum.index_offset),
                "thinning": spectrum.thinning,
                "dilation": spectrum.dilation,
            },
        }
    )
    return config
