"""Level-set extraction: marching-squares polylines in 2D, crossings in 1D."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from skimage import measure

from .grid import GridFunction


@dataclass
class FreeBoundary:
    """Extracted level-set contour plus the node mask it came from.

    components holds one (m, d) array of physical coordinates per connected
    piece, ordered along the curve (closed pieces repeat their first vertex).
    """

    level: float
    components: list[np.ndarray] = field(default_factory=list)
    mask: np.ndarray | None = None

    def num_vertices(self) -> int:
        return sum(len(c) for c in self.components)

    def all_points(self) -> np.ndarray:
        if not self.components:
            return np.zeros((0, 1))
        return np.concatenate(self.components, axis=0)

    def write_csv(self, path) -> None:
        """`component_id,x[,y]` rows ordered along each contour."""
        dim = self.components[0].shape[1] if self.components else 2
        header = "component_id,x" if dim == 1 else "component_id,x,y"
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for cid, comp in enumerate(self.components):
                for pt in comp:
                    fh.write(f"{cid}," + ",".join(f"{v:.17g}" for v in pt) + "\n")


def contour_polylines(u: GridFunction, level: float) -> FreeBoundary:
    """Ordered contours of u = level; 1D gives linearly interpolated crossings."""
    spec = u.spec
    mask = u.values > level
    if spec.dim == 1:
        comps = []
        vals = u.values - level
        sign_change = vals[:-1] * vals[1:] < 0
        x = spec.coords(0)
        for j in np.nonzero(sign_change)[0]:
            theta = vals[j] / (vals[j] - vals[j + 1])
            comps.append(np.array([[x[j] + theta * spec.h]]))
        # nodes exactly at the level count as crossings too
        for j in np.nonzero(vals == 0.0)[0]:
            comps.append(np.array([[x[j]]]))
        return FreeBoundary(level=level, components=comps, mask=mask)

    raw = measure.find_contours(u.values, level)
    lo = np.array(spec.lo)
    comps = [lo + c * spec.h for c in raw]
    return FreeBoundary(level=level, components=comps, mask=mask)


def mean_radius(fb: FreeBoundary, center=(0.0, 0.0)) -> float:
    """Mean distance of all contour vertices from a center point."""
    pts = fb.all_points()
    if len(pts) == 0:
        raise ValueError("empty contour")
    return float(np.mean(np.linalg.norm(pts - np.asarray(center), axis=1)))


def max_radius(fb: FreeBoundary, center=(0.0, 0.0)) -> float:
    pts = fb.all_points()
    if len(pts) == 0:
        raise ValueError("empty contour")
    return float(np.max(np.linalg.norm(pts - np.asarray(center), axis=1)))


def area_radius(u: GridFunction, eps: float) -> float:
    """Radius of the disk whose area matches the cell count of {u > eps}."""
    count = int(np.count_nonzero(u.values > eps))
    return float(np.sqrt(count * u.spec.h**u.spec.dim / np.pi))
