"""Finite planar point configurations."""
from dataclasses import dataclass, field

import numpy as np


@dataclass(eq=False)
class Configuration:
    """A finite set of points in the plane, stored as complex numbers.

    ``metadata`` carries provenance (radius, margin, seed, mode, ...) and, for
    sampler output, per-point diagnostics such as inversion residuals.
    """

    points: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(pts)):
            raise ValueError("configuration contains non-finite coordinates")
        self.points = pts

    def __len__(self):
        return int(self.points.size)

    @property
    def radii(self):
        return np.abs(self.points)

    @property
    def angles(self):
        return np.mod(np.angle(self.points), 2 * np.pi)

    def copy(self, points=None, **metadata):
        meta = dict(self.metadata)
        meta.update(metadata)
        return Configuration(self.points.copy() if points is None else points, meta)
