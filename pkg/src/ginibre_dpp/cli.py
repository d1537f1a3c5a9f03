"""Command line interface: ``ginibre-dpp {sample,bounds,distance,stats,plot,bench}``.

Exit codes: 0 success, 2 invalid usage / configuration / unreadable input,
3 numerical failure inside a sampler.
"""
import argparse
import glob
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from ._random import fresh_seed, spawn_seeds
from .bench import DEFAULT_SIZES, loglog_exponent, per_point_cost, time_projection_draws
from .diagnostics import count_moments, intensity_profile
from .exceptions import NumericalDegeneracyError, RejectionLimitError
from .index_sampler import count_distribution, tail_mass
from .io import atomic_write, read_config, to_svg, write_config
from .kernel import build_ring_basis, build_spectrum
from .projection_sampler import sample_ginibre
from .transport import (
    CardinalityMismatchError,
    approximation_bound,
    cardinality_lower_bound,
    kr_truncation_bound,
    quadratic_matching_cost,
    tv_config_distance,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
THREADS_ENV = "GINIBRE_DPP_THREADS"


class UsageError(Exception):
    pass


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value

    return parse


def _tolerance(text):
    value = float(text)
    if not 0 < value <= 1e-6:
        raise argparse.ArgumentTypeError(f"tolerance must lie in (0, 1e-6], got {text}")
    return value


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _default_workers():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}")


def _add_process_args(p, radius_required=True):
    p.add_argument("--radius", "-R", type=_positive(float), required=radius_required)
    p.add_argument("--margin", "-c", type=_positive(float), default=3.0)
    p.add_argument("--palm", action="store_true", help="Palm version (point at the origin)")
    p.add_argument("--thinning", type=float, default=1.0, help="retention probability p")
    p.add_argument("--dilation", type=_positive(float), default=1.0, help="dilation ratio rho")


def build_parser():
    parser = argparse.ArgumentParser(prog="ginibre-dpp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw configurations and write one file each")
    _add_process_args(p)
    p.add_argument("--mode", choices=("exact", "ring"), default="exact")
    p.add_argument("--seed", type=_seed, default=None)
    p.add_argument("--replications", "-n", type=_positive(int), default=1)
    p.add_argument("--tol", type=_tolerance, default=1e-9)
    p.add_argument("--output", "-o", default=".", help="output directory")
    p.add_argument("--prefix", default="sample")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=_positive(int), default=None)

    p = sub.add_parser("bounds", help="print error bounds for (R, c)")
    _add_process_args(p)

    p = sub.add_parser("distance", help="distances between two point files")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--tol", type=float, default=0.0, help="coincidence tolerance for TV")

    p = sub.add_parser("stats", help="count moments and intensity profile of sample files")
    p.add_argument("patterns", nargs="+", help="files or glob patterns")
    _add_process_args(p, radius_required=False)
    p.add_argument("--bins", type=_positive(int), default=10)

    p = sub.add_parser("plot", help="SVG scatter plot of a point file")
    p.add_argument("input")
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--radius", "-R", type=_positive(float), default=None)
    p.add_argument("--size", type=_positive(int), default=400)

    p = sub.add_parser("bench", help="per-step timings over active-set sizes")
    p.add_argument("--sizes", default=",".join(map(str, DEFAULT_SIZES)))
    p.add_argument("--modes", default="exact,ring")
    p.add_argument("--margin", "-c", type=_positive(float), default=3.0)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--output", "-o", default=None, help="CSV file (default: stdout)")
    return parser


# -- sample -------------------------------------------------------------------


def _sample_one(job):
    args, child, path = job
    config = sample_ginibre(
        args["radius"],
        args["margin"],
        rng=np.random.Generator(np.random.PCG64(child)),
        mode=args["mode"],
        palm=args["palm"],
        thinning=args["thinning"],
        dilation=args["dilation"],
        tol=args["tol"],
    )
    config.metadata["seed"] = args["seed"]
    write_config(config, path, args["format"], tool_version=__version__)
    return path, len(config)


def cmd_sample(args, out):
    seed = args.seed if args.seed is not None else fresh_seed()
    if not 0 < args.thinning <= 1:
        raise UsageError("--thinning must lie in (0, 1]")
    os.makedirs(args.output, exist_ok=True)
    params = dict(
        radius=args.radius, margin=args.margin, mode=args.mode, palm=args.palm,
        thinning=args.thinning, dilation=args.dilation, tol=args.tol, seed=seed,
        format=args.format,
    )
    jobs = []
    for k, child in enumerate(spawn_seeds(seed, args.replications)):
        name = f"{args.prefix}_{seed}_{k:04d}.{args.format}"
        jobs.append((params, child, os.path.join(args.output, name)))
    workers = args.workers or _default_workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sample_one, jobs))
    else:
        results = [_sample_one(job) for job in jobs]
    manifest = dict(params, tool_version=__version__, replications=args.replications,
                    files=[{"path": os.path.basename(p), "n_points": n} for p, n in results])
    atomic_write(os.path.join(args.output, f"{args.prefix}_{seed}_manifest.json"),
                 json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    print(f"seed {seed}: wrote {len(results)} file(s) to {args.output}", file=out)
    for path, n in results:
        print(f"{path}\t{n}", file=out)


# -- bounds -------------------------------------------------------------------


def cmd_bounds(args, out):
    if not 0 < args.thinning <= 1:
        raise UsageError("--thinning must lie in (0, 1]")
    spec = build_spectrum(args.radius, args.margin, args.palm, args.thinning, args.dilation)
    R, c = spec.radius, spec.margin
    tail = tail_mass(spec, spec.n_terms)
    approx = approximation_bound(build_ring_basis(spec))

    def fmt(fn):
        try:
            return f"{fn(R, c):.6e}"
        except ValueError:
            return "n/a (requires R > c)"

    rows = [
        ("radius", f"{R:g}"),
        ("margin", f"{c:g}"),
        ("n_terms", str(spec.n_terms)),
        ("expected_count", f"{spec.trace:.12g}"),
        ("tail_mass", f"{tail.total:.6e}"),
        ("kr_truncation_bound", fmt(kr_truncation_bound)),
        ("cardinality_lower_bound", fmt(cardinality_lower_bound)),
        ("approximation_bound", f"{approx.total:.6e}"),
        ("approximation_reference_scale", f"{approx.reference_scale:.6e}"),
    ]
    width = max(len(k) for k, _ in rows)
    for key, value in rows:
        print(f"{key:<{width}}  {value}", file=out)


# -- distance -----------------------------------------------------------------


def cmd_distance(args, out):
    a = read_config(args.first)
    b = read_config(args.second)
    print(f"tv_distance\t{tv_config_distance(a, b, args.tol)}", file=out)
    try:
        cost = quadratic_matching_cost(a, b).cost
        print(f"matching_cost\t{cost!r}", file=out)
    except CardinalityMismatchError:
        print("matching_cost\tinf", file=out)


# -- stats --------------------------------------------------------------------


def _expand(patterns):
    files = []
    for pattern in patterns:
        hits = sorted(glob.glob(pattern))
        if not hits:
            raise UsageError(f"no files match {pattern!r}")
        files.extend(hits)
    return files


def cmd_stats(args, out):
    files = _expand(args.patterns)
    samples = [read_config(f) for f in files]
    meta = samples[0].metadata
    radius = args.radius or meta.get("radius")
    if radius is None:
        raise UsageError("--radius is required for files without metadata")
    variant = meta.get("variant") or {}
    margin = args.margin if args.radius else meta.get("margin", args.margin)
    palm = args.palm or bool(variant.get("palm", False))
    thinning = args.thinning if args.thinning != 1.0 else variant.get("thinning", 1.0)
    dilation = args.dilation if args.dilation != 1.0 else variant.get("dilation", 1.0)
    spec = build_spectrum(radius, margin, palm, thinning, dilation)
    lam = spec.eigenvalues
    print(f"files\t{len(samples)}", file=out)
    if len(samples) >= 2:
        mean, var = count_moments(samples)
        print(f"count_mean\t{mean:.6g}\ttheory\t{lam.sum():.6g}", file=out)
        print(f"count_variance\t{var:.6g}\ttheory\t{np.sum(lam * (1 - lam)):.6g}", file=out)
    prof = intensity_profile(samples, spec, args.bins)
    print("r_lo\tr_hi\tempirical\ttheory", file=out)
    for lo, hi, emp, th in prof.rows():
        print(f"{lo:.4f}\t{hi:.4f}\t{emp:.6f}\t{th:.6f}", file=out)


# -- plot ---------------------------------------------------------------------


def cmd_plot(args, out):
    config = read_config(args.input)
    atomic_write(args.output, to_svg(config, radius=args.radius, size=args.size))
    print(f"wrote {args.output}", file=out)


# -- bench --------------------------------------------------------------------


def cmd_bench(args, out):
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError:
        raise UsageError(f"--sizes must be comma-separated integers, got {args.sizes!r}")
    modes = [m for m in args.modes.split(",") if m]
    if any(m not in ("exact", "ring") for m in modes) or not sizes or min(sizes) < 1:
        raise UsageError("invalid --sizes or --modes")
    rows = time_projection_draws(sizes, modes, args.margin, args.seed)
    lines = ["mode,size,step,time_a,time_b,time_c"]
    lines += [f"{r['mode']},{r['size']},{r['step']},{r['time_a']!r},{r['time_b']!r},"
              f"{r['time_c']!r}" for r in rows]
    text = "\n".join(lines) + "\n"
    if args.output:
        atomic_write(args.output, text)
    else:
        out.write(text)
    if len(sizes) >= 2:
        for mode in modes:
            s, cost = per_point_cost(rows, mode)
            print(f"# {mode}: log-log exponent of per-point A+B time = "
                  f"{loglog_exponent(s, cost):.3f}", file=sys.stderr)


COMMANDS = {
    "sample": cmd_sample,
    "bounds": cmd_bounds,
    "distance": cmd_distance,
    "stats": cmd_stats,
    "plot": cmd_plot,
    "bench": cmd_bench,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args, out)
    except (NumericalDegeneracyError, RejectionLimitError, ArithmeticError) as exc:
        print(f"ginibre-dpp: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, ValueError, OSError) as exc:
        print(f"ginibre-dpp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
