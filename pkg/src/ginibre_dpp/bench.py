"""Per-step timings of the projection sampler across active-set sizes."""
import math

import numpy as np

from .kernel import build_ring_basis, build_spectrum
from .projection_sampler import sample_projection_dpp

DEFAULT_SIZES = (64, 128, 256, 512, 1024)


def time_projection_draws(sizes=DEFAULT_SIZES, modes=("exact", "ring"), margin=3.0, seed=0):
    """Draw one configuration per ``(mode, size)`` with ``I = {0, ..., size-1}``
    on the disc of radius ``sqrt(size)``.

    Returns a list of row dicts ``mode, size, step, time_a, time_b, time_c``.
    """
    rows = []
    for size in sizes:
        spec = build_spectrum(math.sqrt(size), margin)
        basis = build_ring_basis(spec)
        for mode in modes:
            config = sample_projection_dpp(
                basis if mode == "ring" else spec, range(size), seed, mode=mode
            )
            for step, (ta, tb, tc) in enumerate(config.metadata["timings"], start=1):
                rows.append(dict(mode=mode, size=size, step=step, time_a=ta, time_b=tb, time_c=tc))
    return rows


def per_point_cost(rows, mode, phases=("time_a", "time_b")):
    """Mean per-point time of the given phases for each size of one mode."""
    sizes = sorted({r["size"] for r in rows if r["mode"] == mode})
    means = []
    for size in sizes:
        sel = [sum(r[p] for p in phases) for r in rows if r["mode"] == mode and r["size"] == size]
        means.append(float(np.mean(sel)))
    return np.array(sizes), np.array(means)


def loglog_exponent(sizes, costs):
    """Least-squares slope of ``log cost`` against ``log size``."""
    return float(np.polyfit(np.log(sizes), np.log(costs), 1)[0])
