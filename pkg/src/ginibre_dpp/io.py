"""Point-file formats: CSV, JSON and SVG scatter plots.

Floats are written with :func:`repr`, the shortest string that round-trips
exactly and never depends on the locale.
"""
import json
import os
import tempfile

import numpy as np

from .configuration import Configuration

__all__ = [
    "to_csv",
    "to_json",
    "to_svg",
    "write_config",
    "read_config",
    "atomic_write",
]

CSV_HEADER = "re,im"
_META_KEYS = ("radius", "margin", "seed", "mode", "n_points", "tool_version", "variant")


def _fmt(x):
    return repr(float(x))


def to_csv(config):
    lines = [CSV_HEADER]
    lines.extend(f"{_fmt(z.real)},{_fmt(z.imag)}" for z in config.points)
    return "\n".join(lines) + "\n"


def _json_safe(value):
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def to_json(config, tool_version=None):
    meta = {k: config.metadata.get(k) for k in _META_KEYS if k in config.metadata}
    meta["n_points"] = len(config)
    if tool_version is not None:
        meta["tool_version"] = tool_version
    doc = dict(_json_safe(meta))
    doc["points"] = [[float(z.real), float(z.imag)] for z in config.points]
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_config(config, path, fmt=None, tool_version=None):
    fmt = fmt or _format_of(path)
    text = to_json(config, tool_version) if fmt == "json" else to_csv(config)
    atomic_write(path, text)


def _format_of(path):
    return "json" if str(path).lower().endswith(".json") else "csv"


def read_config(path):
    """Read a CSV (``re,im`` header) or JSON point file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if _format_of(path) == "json":
        doc = json.loads(text)
        pts = np.array([complex(x, y) for x, y in doc.pop("points")], dtype=complex)
        return Configuration(pts, doc)
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].replace(" ", "") != CSV_HEADER:
        raise ValueError(f"{path}: expected CSV header {CSV_HEADER!r}")
    pts = []
    for k, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 2:
            raise ValueError(f"{path}:{k}: expected two fields, got {line!r}")
        pts.append(complex(float(fields[0]), float(fields[1])))
    return Configuration(np.array(pts, dtype=complex))


def to_svg(config, radius=None, size=400, point_radius=None):
    """SVG scatter of the points with the disc outline; byte-stable for fixed input."""
    pts = config.points
    if radius is None:
        radius = config.metadata.get("radius") or (float(np.abs(pts).max()) if len(pts) else 1.0)
        radius *= float(np.sqrt((config.metadata.get("variant") or {}).get("dilation", 1.0)))
    radius = float(radius)
    half = size / 2.0
    scale = (half - 4.0) / radius
    if point_radius is None:
        point_radius = max(0.6, min(3.0, 0.35 * size / max(np.sqrt(len(pts)), 1.0) / 4.0))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<circle cx="{half:.3f}" cy="{half:.3f}" r="{radius * scale:.3f}" '
        'fill="none" stroke="black" stroke-width="1"/>',
        '<g fill="#1f4e9c">',
    ]
    for z in pts:
        out.append(
            f'<circle cx="{half + z.real * scale:.3f}" cy="{half - z.imag * scale:.3f}" '
            f'r="{point_radius:.3f}"/>'
        )
    out.extend(["</g>", "</svg>"])
    return "\n".join(out) + "\n"
