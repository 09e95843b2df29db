"""Uniform Cartesian node grids in 1D/2D and the discrete operators shared by all solvers.

Grids have square cells (one spacing h for every axis) and Dirichlet data is
given on the boundary nodes of the box.  The discrete gradient is the forward
difference and the Laplacian is the standard (2d+1)-point stencil; the two are
adjoint in the sense that the backward-difference divergence of the forward
gradient reproduces the Laplacian at interior nodes.  This keeps the
Euler-Lagrange equation of the discrete Dirichlet energy identical to the
screened Poisson substep used by the iterative schemes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GridError(ValueError):
    """Invalid grid construction or mismatched grid operands."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform node grid on a box.

    Nodes along axis k sit at ``lo[k] + j*h`` for ``j = 0..n[k]-1``, so the
    spacing ``h = (hi-lo)/(n-1)`` must agree across axes (square cells).
    Coordinates are reproducible bit-exactly from ``(lo, h, j)``.
    """

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    n: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.lo) == len(self.hi) == len(self.n)):
            raise GridError("lo, hi, n must have one entry per axis")
        if self.dim not in (1, 2):
            raise GridError(f"only 1D and 2D grids supported, got dim={self.dim}")
        if any(nk < 3 for nk in self.n):
            raise GridError("need at least 3 nodes per axis")
        spacings = [(b - a) / (nk - 1) for a, b, nk in zip(self.lo, self.hi, self.n)]
        if any(hk <= 0 for hk in spacings):
            raise GridError("extent_hi must exceed extent_lo on every axis")
        h0 = spacings[0]
        if any(abs(hk - h0) > 1e-12 * abs(h0) for hk in spacings[1:]):
            raise GridError(f"anisotropic grid rejected: spacings {spacings}")

    @classmethod
    def line(cls, lo: float, hi: float, n: int) -> "GridSpec":
        return cls((float(lo),), (float(hi),), (int(n),))

    @classmethod
    def box(cls, lo: float, hi: float, n: int) -> "GridSpec":
        """Square 2D box [lo,hi]^2 with n nodes per axis."""
        lo, hi = float(lo), float(hi)
        return cls((lo, lo), (hi, hi), (int(n), int(n)))

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def h(self) -> float:
        return (self.hi[0] - self.lo[0]) / (self.n[0] - 1)

    @property
    def num_nodes(self) -> int:
        return int(np.prod(self.n))

    def coords(self, axis: int = 0) -> np.ndarray:
        return self.lo[axis] + np.arange(self.n[axis]) * self.h

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        """Node coordinate arrays of full grid shape, axis order matching values."""
        return tuple(np.meshgrid(*(self.coords(k) for k in range(self.dim)),
                                 indexing="ij"))

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        for ax in range(self.dim):
            mask[_axis_slice(self.dim, ax, 0)] = True
            mask[_axis_slice(self.dim, ax, -1)] = True
        return mask

    def interior(self) -> tuple[slice, ...]:
        return (slice(1, -1),) * self.dim


def _axis_slice(dim: int, axis: int, index) -> tuple:
    sl = [slice(None)] * dim
    sl[axis] = index
    return tuple(sl)


def _shifted(dim: int, axis: int, lo: int, hi: int | None) -> tuple:
    """Interior-shaped slice tuple shifted along one axis."""
    sl = [slice(1, -1)] * dim
    sl[axis] = slice(lo, hi)
    return tuple(sl)


@dataclass
class GridFunction:
    """Scalar field sampled at the nodes of a GridSpec (row-major axis order)."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.spec.shape:
            raise GridError(f"values shape {vals.shape} != grid shape {self.spec.shape}")
        if not np.all(np.isfinite(vals)):
            raise GridError("grid function contains non-finite entries")
        self.values = vals

    @classmethod
    def from_callable(cls, spec: GridSpec, fn) -> "GridFunction":
        return cls(spec, fn(*spec.meshgrid()) * np.ones(spec.shape))

    @classmethod
    def constant(cls, spec: GridSpec, c: float) -> "GridFunction":
        return cls(spec, np.full(spec.shape, float(c)))

    def copy(self) -> "GridFunction":
        return GridFunction(self.spec, self.values.copy())

    def write_csv(self, path) -> None:
        """Write `x[,y],value` rows in row-major node order, 17 significant digits."""
        coords = self.spec.meshgrid()
        header = ("x,value" if self.spec.dim == 1 else "x,y,value")
        with open(path, "w") as fh:
            fh.write(header + "\n")
            flat = [c.ravel() for c in coords] + [self.values.ravel()]
            for row in zip(*flat):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

    @classmethod
    def read_csv(cls, path) -> "GridFunction":
        data = np.genfromtxt(path, delimiter=",", skip_header=1)
        data = np.atleast_2d(data)
        dim = data.shape[1] - 1
        axes = []
        for k in range(dim):
            # row-major order: unique preserves the sorted node coordinates
            axes.append(np.unique(data[:, k]))
        n = tuple(len(a) for a in axes)
        spec = GridSpec(tuple(a[0] for a in axes), tuple(a[-1] for a in axes), n)
        return cls(spec, data[:, -1].reshape(n))


class DirichletBC:
    """Dirichlet values on the boundary nodes of a grid.

    Stored as a full-shape array whose interior entries are ignored; applying
    the data twice is idempotent.
    """

    def __init__(self, spec: GridSpec, values: np.ndarray):
        vals = np.asarray(values, dtype=float) * np.ones(spec.shape)
        if not np.all(np.isfinite(vals[spec.boundary_mask()])):
            raise GridError("non-finite boundary values")
        self.spec = spec
        self.values = vals
        self.mask = spec.boundary_mask()

    @classmethod
    def constant(cls, spec: GridSpec, c: float) -> "DirichletBC":
        return cls(spec, np.full(spec.shape, float(c)))

    @classmethod
    def from_callable(cls, spec: GridSpec, fn) -> "DirichletBC":
        return cls(spec, fn(*spec.meshgrid()) * np.ones(spec.shape))

    @classmethod
    def from_grid_function(cls, u: GridFunction) -> "DirichletBC":
        """Trace of a grid function on the boundary nodes."""
        return cls(u.spec, u.values)

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Overwrite boundary entries in place; returns the same array."""
        values[self.mask] = self.values[self.mask]
        return values

    def check_spec(self, spec: GridSpec) -> None:
        if spec != self.spec:
            raise GridError("boundary data defined on a different grid")


def interior_laplacian_values(values: np.ndarray, h: float) -> np.ndarray:
    """(2d+1)-point Laplacian evaluated at interior nodes only."""
    dim = values.ndim
    core = values[(slice(1, -1),) * dim]
    acc = -2.0 * dim * core
    for ax in range(dim):
        acc = acc + values[_shifted(dim, ax, 2, None)] + values[_shifted(dim, ax, 0, -2)]
    return acc / h**2


def laplacian(u: GridFunction, bc: DirichletBC) -> GridFunction:
    """Discrete Laplacian with boundary neighbors pinned at the Dirichlet data.

    Boundary entries of the result are set to 0 by convention; the Laplacian
    is meaningful only at interior nodes.
    """
    bc.check_spec(u.spec)
    merged = np.where(bc.mask, bc.values, u.values)
    out = np.zeros(u.spec.shape)
    out[u.spec.interior()] = interior_laplacian_values(merged, u.spec.h)
    return GridFunction(u.spec, out)


def gradient_forward(u: GridFunction) -> np.ndarray:
    """Forward-difference gradient, shape (d, *grid shape).

    The high boundary face of each axis carries the one-sided (backward)
    difference so the field is defined at every node.
    """
    h = u.spec.h
    dim = u.spec.dim
    out = np.empty((dim,) + u.spec.shape)
    for ax in range(dim):
        d = np.diff(u.values, axis=ax) / h
        out[ax][_axis_slice(dim, ax, slice(0, -1))] = d
        out[ax][_axis_slice(dim, ax, -1)] = d[_axis_slice(dim, ax, -1)]
    return out


def dirichlet_energy(u: GridFunction) -> float:
    """h^d * sum of (1/2)|forward difference|^2 with each grid face counted once.

    Counting faces once (rather than re-counting the copied high-boundary
    value of gradient_forward) is what makes the energy's Euler-Lagrange
    equation exactly the discrete Poisson equation.
    """
    h = u.spec.h
    total = 0.0
    for ax in range(u.spec.dim):
        d = np.diff(u.values, axis=ax)
        total += 0.5 * float(np.sum(d * d)) / h**2
    return h**u.spec.dim * total


def grad_inner(u: GridFunction, w: GridFunction) -> float:
    """h^d * sum over faces of (forward diff u)*(forward diff w); adjoint to -laplacian."""
    if u.spec != w.spec:
        raise GridError("grid mismatch")
    h = u.spec.h
    total = 0.0
    for ax in range(u.spec.dim):
        total += float(np.sum(np.diff(u.values, axis=ax) * np.diff(w.values, axis=ax))) / h**2
    return h**u.spec.dim * total


def linf_diff(a: GridFunction, b: GridFunction) -> float:
    """Max-norm distance between two grid functions on the same grid."""
    if a.spec != b.spec:
        raise GridError("grid mismatch")
    return float(np.max(np.abs(a.values - b.values)))
