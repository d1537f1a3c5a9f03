"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or directly with ``python tests/test_acceptance.py``.
"""
import functools
import math
import sys
import time

import numpy as np
import pytest
from scipy import stats

from ginibre_dpp.bench import DEFAULT_SIZES, loglog_exponent, per_point_cost, time_projection_draws
from ginibre_dpp.diagnostics import chi2_counts, intensity_profile, ks_two_sample
from ginibre_dpp.index_sampler import (
    count_distribution,
    coupled_active_sets,
    sample_active_set,
    tail_mass,
)
from ginibre_dpp.kernel import build_ring_basis, build_spectrum
from ginibre_dpp.projection_sampler import sample_ginibre, sample_projection_dpp, sample_rejection
from ginibre_dpp.transport import (
    brute_force_matching,
    cardinality_lower_bound,
    kr_truncation_bound,
    quadratic_matching_cost,
    radial_w2,
)

RESULTS = {}
RESIDUAL_TOL = 1e-9
P_MIN = 1e-3


def report(number, name, passed, detail, elapsed):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2} {name}: {detail} ({elapsed:.1f}s)"
    RESULTS[number] = line
    print(line)
    return passed


def timed(fn):
    @functools.wraps(fn)
    def wrapper():
        t0 = time.perf_counter()
        out = fn()
        return out, time.perf_counter() - t0

    return wrapper


# -- 1 ------------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    worst = []
    ok = True
    for R in (2.0, 5.0, 10.0, 20.0):
        spec = build_spectrum(R, 3.0)
        deficit = R * R - float(np.sum(spec.eigenvalues))
        bound = math.sqrt(2 / math.pi) * R * math.exp(-9)
        ok &= 0.0 <= deficit <= bound
        worst.append(f"R={R:g}: {deficit:.2e}<={bound:.2e}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1.0
    return report(1, "trace identity", ok, "; ".join(worst), elapsed)


# -- 2 ------------------------------------------------------------------------


def criterion_2():
    t0 = time.perf_counter()
    ok = True
    ratios = []
    for R in (5.0, 10.0, 20.0):
        for c in (1.0, 2.0, 3.0):
            spec = build_spectrum(R, c)
            tail = tail_mass(spec, spec.n_terms).total
            bound = kr_truncation_bound(R, c)
            ok &= tail <= bound
            ratios.append(tail / bound)
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 5.0
    return report(2, "truncation bound", ok, f"max tail/bound = {max(ratios):.3f}", elapsed)


# -- 3 ------------------------------------------------------------------------


def criterion_3():
    t0 = time.perf_counter()
    R, c, seeds = 5.0, 2.0, 100_000
    spec = build_spectrum(R, c)
    threshold = (R - c) ** 2
    below = sum(len(sample_active_set(spec, seed)) < threshold for seed in range(seeds))
    rate = below / seeds
    bound = cardinality_lower_bound(R, c)
    se = math.sqrt(bound * (1 - bound) / seeds)
    elapsed = time.perf_counter() - t0
    ok = rate <= bound + 3 * se and elapsed < 30.0
    detail = f"P(|I| < {threshold:g}) = {rate:.5f} <= {bound:.5f} + 3*{se:.5f}"
    return report(3, "cardinality lower bound", ok, detail, elapsed)


# -- shared runs for 4-6 (their residuals feed criterion 8) -------------------


@functools.lru_cache(maxsize=None)
@timed
def _run_small_scale():
    spec = build_spectrum(3.0, 3.0)
    active = (0, 1, 2)
    reps = 5000
    gen = np.random.default_rng(20240401)
    inverse = [sample_projection_dpp(spec, active, gen, "exact", RESIDUAL_TOL) for _ in range(reps)]
    reject = [sample_rejection(spec, active, gen) for _ in range(reps)]
    return inverse, reject


@functools.lru_cache(maxsize=None)
@timed
def _run_counts():
    gen = np.random.default_rng(20240402)
    spec = build_spectrum(4.0, 3.0)
    return spec, [sample_ginibre(4.0, 3.0, rng=gen, spectrum=spec) for _ in range(2000)]


@functools.lru_cache(maxsize=None)
@timed
def _run_intensity():
    gen = np.random.default_rng(20240403)
    spec = build_spectrum(10.0, 3.0)
    return spec, [sample_ginibre(10.0, 3.0, rng=gen, spectrum=spec) for _ in range(100)]


def _relative_angle(configs):
    pts = np.array([cfg.points for cfg in configs])
    return np.mod(np.angle(pts[:, 2]) - np.angle(pts[:, 0]), 2 * np.pi)


# -- 4 ------------------------------------------------------------------------


def criterion_4():
    (inverse, reject), elapsed = _run_small_scale()
    # one point per configuration keeps the samples independent
    r_inv = np.array([abs(cfg.points[-1]) for cfg in inverse])
    r_rej = np.array([abs(cfg.points[-1]) for cfg in reject])
    _, p_ks = ks_two_sample(r_inv, r_rej)
    bins = np.linspace(0, 2 * np.pi, 13)
    table = np.array([np.histogram(_relative_angle(s), bins)[0] for s in (inverse, reject)])
    _, p_chi2, _, _ = stats.chi2_contingency(table)
    ok = p_ks > P_MIN and p_chi2 > P_MIN and elapsed < 120.0
    detail = f"KS radius p = {p_ks:.3f}, chi2 12 angular bins p = {p_chi2:.3f}"
    return report(4, "inverse transform vs rejection", ok, detail, elapsed)


# -- 5 ------------------------------------------------------------------------


def criterion_5():
    (spec, configs), elapsed = _run_counts()
    sizes = np.array([len(cfg) for cfg in configs])
    _, p_chi2, dof = chi2_counts(sizes, count_distribution(spec))
    lam = spec.eigenvalues
    se = math.sqrt(float(np.sum(lam * (1 - lam))) / sizes.size)
    z = (sizes.mean() - lam.sum()) / se
    ok = p_chi2 > P_MIN and abs(z) <= 4 and elapsed < 300.0
    detail = f"chi2 p = {p_chi2:.3f} ({dof} dof), mean {sizes.mean():.3f} vs {lam.sum():.3f} (z = {z:+.2f})"
    return report(5, "count statistics", ok, detail, elapsed)


# -- 6 ------------------------------------------------------------------------

# Annuli wide enough for the 5% band to sit at more than 4 standard errors
INTENSITY_EDGES = (0.0, 5.0, 7.0)


def criterion_6():
    (spec, configs), elapsed = _run_intensity()
    prof = intensity_profile(configs, spec, edges=INTENSITY_EDGES)
    rel = prof.empirical * math.pi - 1.0
    ok = bool(np.all(np.abs(rel) <= 0.05)) and elapsed < 600.0
    cells = ", ".join(f"[{lo:g},{hi:g}]: {d:+.2%}" for (lo, hi, _, _), d in zip(prof.rows(), rel))
    return report(6, "intensity", ok, f"deviation from 1/pi {cells}", elapsed)


# -- 7 ------------------------------------------------------------------------


def criterion_7():
    t0 = time.perf_counter()
    gen = np.random.default_rng(20240407)
    worst = 0.0
    for _ in range(200):
        n = int(gen.integers(2, 8))
        x = gen.uniform(-3, 3, n) + 1j * gen.uniform(-3, 3, n)
        y = gen.uniform(-3, 3, n) + 1j * gen.uniform(-3, 3, n)
        worst = max(worst, abs(quadratic_matching_cost(x, y).cost - brute_force_matching(x, y).cost))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 10.0
    return report(7, "matching oracle", ok, f"max |cost diff| = {worst:.2e}", elapsed)


# -- 8 ------------------------------------------------------------------------


def criterion_8():
    t0 = time.perf_counter()
    (inverse, _), _ = _run_small_scale()
    (_, counts), _ = _run_counts()
    (_, intens), _ = _run_intensity()
    res = [cfg.metadata["residuals"].ravel() for cfg in (*inverse, *counts, *intens)]
    res = np.concatenate(res)
    violations = int(np.sum(~(np.abs(res) <= RESIDUAL_TOL)))
    elapsed = time.perf_counter() - t0
    detail = f"{res.size} coordinates, max |residual| = {np.max(np.abs(res)):.2e}, {violations} violations"
    return report(8, "inversion residuals", violations == 0, detail, elapsed)


# -- 9 ------------------------------------------------------------------------


def criterion_9():
    t0 = time.perf_counter()
    spec = build_spectrum(5.0, 3.0)
    basis = build_ring_basis(spec)
    slack = []
    for n in range(spec.n_terms):
        slack.append(-math.log(basis.mass[n]) + 1e-9 - radial_w2(n, spec, basis))
    elapsed = time.perf_counter() - t0
    ok = min(slack) >= 0 and elapsed < 60.0
    return report(9, "ring bound consistency", ok, f"min slack = {min(slack):.2e} over n < {spec.n_terms}", elapsed)


# -- 10 -----------------------------------------------------------------------


def criterion_10():
    t0 = time.perf_counter()
    rows = time_projection_draws(DEFAULT_SIZES, ("exact", "ring"), 3.0, 20240410)
    sizes, ring_cost = per_point_cost(rows, "ring")
    _, dense_cost = per_point_cost(rows, "exact")
    slope = loglog_exponent(sizes, ring_cost)
    wall = {
        mode: sum(r["time_a"] + r["time_b"] + r["time_c"] for r in rows
                  if r["mode"] == mode and r["size"] == 1024)
        for mode in ("exact", "ring")
    }
    t1 = time.perf_counter()
    big = sample_ginibre(28.6, 3.0, rng=20240411, mode="ring")
    big_time = time.perf_counter() - t1
    elapsed = time.perf_counter() - t0
    ok = slope < 1.8 and wall["ring"] < wall["exact"] and big_time < 600.0 and elapsed < 1800.0
    detail = (
        f"ring exponent {slope:.2f} (dense {loglog_exponent(sizes, dense_cost):.2f}, "
        f"dense over 256-1024 {loglog_exponent(sizes[2:], dense_cost[2:]):.2f}); "
        f"|I|=1024 ring {wall['ring']:.1f}s vs dense {wall['exact']:.1f}s; "
        f"R=28.6 ring config of {len(big)} points ({big.metadata['margin']:g} margin, "
        f"{build_spectrum(28.6, 3.0).n_terms} terms) in {big_time:.1f}s"
    )
    return report(10, "performance trend", ok, detail, elapsed)


# -- 11 -----------------------------------------------------------------------


def criterion_11():
    t0 = time.perf_counter()
    seeds = 10_000
    ok = True
    parts = []
    for R in (5.0, 10.0):
        full = build_spectrum(R, 7.0)
        for c in (1.0, 2.0, 3.0):
            trunc = build_spectrum(R, c)
            mismatches = 0
            for seed in range(seeds):
                a, b = coupled_active_sets(full, trunc, seed)
                mismatches += len(a) != len(b)
            rate = mismatches / seeds
            tail = tail_mass(trunc, trunc.n_terms).total
            se = math.sqrt(rate * (1 - rate) / seeds)
            ok &= rate <= tail + 3 * se
            parts.append(f"R={R:g},c={c:g}: {rate:.2e}<={tail:.2e}+3*{se:.1e}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60.0
    return report(11, "coupling", ok, "; ".join(parts), elapsed)


CRITERIA = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
    criterion_7, criterion_8, criterion_9, criterion_10, criterion_11,
]


@pytest.mark.acceptance
@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 12)])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    outcomes = [crit() for crit in CRITERIA]
    print(f"{sum(outcomes)}/{len(outcomes)} criteria passed")
    sys.exit(0 if all(outcomes) else 1)
