"""Rasterization of geometric primitives to 0/1 node masks (node-center membership)."""

from __future__ import annotations

import numpy as np

from .grid import GridFunction, GridSpec


def disk_mask(spec: GridSpec, center=(0.0, 0.0), radius: float = 1.0) -> GridFunction:
    coords = spec.meshgrid()
    sq = sum((c - c0) ** 2 for c, c0 in zip(coords, center))
    return GridFunction(spec, (sq <= radius**2).astype(float))


def rect_mask(spec: GridSpec, lo, hi) -> GridFunction:
    coords = spec.meshgrid()
    inside = np.ones(spec.shape, dtype=bool)
    for c, a, b in zip(coords, np.atleast_1d(lo), np.atleast_1d(hi)):
        inside &= (c >= a) & (c <= b)
    return GridFunction(spec, inside.astype(float))


def polygon_mask(spec: GridSpec, vertices) -> GridFunction:
    """Even-odd crossing-number membership for a closed polygon (2D only)."""
    if spec.dim != 2:
        raise ValueError("polygon masks are 2D only")
    verts = np.asarray(vertices, dtype=float)
    x, y = spec.meshgrid()
    px, py = x.ravel(), y.ravel()
    inside = np.zeros(px.shape, dtype=bool)
    nv = len(verts)
    for i in range(nv):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % nv]
        crosses = (y1 > py) != (y2 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_at = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (px < x_at)
    return GridFunction(spec, inside.reshape(spec.shape).astype(float))


def radial_mask(spec: GridSpec, radius_fn, center=(0.0, 0.0)) -> GridFunction:
    """Membership r <= radius_fn(theta) for a star-shaped region."""
    x, y = spec.meshgrid()
    dx, dy = x - center[0], y - center[1]
    r = np.hypot(dx, dy)
    theta = np.arctan2(dy, dx)
    return GridFunction(spec, (r <= radius_fn(theta)).astype(float))
