"""Matrix-free conjugate-gradient solves for the screened Poisson operator.

Every scheme in the package reduces its smooth substep to
``(lambda*I - Lap_h) u = rhs`` with Dirichlet data eliminated (fixed boundary
values folded into the right-hand side), which keeps the interior operator
symmetric positive definite.  Solves are deliberately inexact inside the outer
iterations; full convergence there buys nothing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grid import DirichletBC, GridError, GridFunction, interior_laplacian_values


@dataclass
class CgSettings:
    rel_tol: float = 1e-6
    max_iter: int = 50
    warm_start: bool = True

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise ValueError("rel_tol must lie in (0, 1)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class CgInfo:
    iterations: int
    converged: bool
    rel_residual: float


def _screened_apply(x: np.ndarray, lam: float, h: float, out: np.ndarray) -> np.ndarray:
    """out = (lam*I - Lap_h) x at interior nodes; x and out vanish on the boundary."""
    interior = (slice(1, -1),) * x.ndim
    out[interior] = lam * x[interior] - interior_laplacian_values(x, h)
    return out


def screened_poisson_cg(rhs_values: np.ndarray, bc: DirichletBC, lam: float,
                        x0_values: np.ndarray | None,
                        settings: CgSettings) -> tuple[np.ndarray, CgInfo]:
    """Raw-array CG core; returns full-shape values with bc applied on the boundary."""
    spec = bc.spec
    h = spec.h
    interior = spec.interior()

    # Fold the Dirichlet data into the right-hand side: with u = x + u_bc and
    # x vanishing on the boundary, b = rhs + Lap_h(u_bc) at interior nodes.
    u_bc = np.zeros(spec.shape)
    u_bc[bc.mask] = bc.values[bc.mask]
    b = np.zeros(spec.shape)
    b[interior] = rhs_values[interior] + interior_laplacian_values(u_bc, h)

    x = np.zeros(spec.shape)
    if settings.warm_start and x0_values is not None:
        x[interior] = x0_values[interior] - u_bc[interior]  # u_bc interior is 0

    scratch = np.zeros(spec.shape)
    r = b - _screened_apply(x, lam, h, scratch)

    rhs_norm = float(np.linalg.norm(rhs_values[interior]))
    ref = rhs_norm if rhs_norm > 0 else float(np.linalg.norm(b))
    if ref == 0.0:
        u = u_bc.copy()
        return u, CgInfo(iterations=0, converged=True, rel_residual=0.0)
    threshold = settings.rel_tol * ref

    p = r.copy()
    rs = float(np.vdot(r, r))
    iters = 0
    res = np.sqrt(rs)
    Ap = np.zeros(spec.shape)
    while res > threshold and iters < settings.max_iter:
        _screened_apply(p, lam, h, Ap)
        alpha = rs / float(np.vdot(p, Ap))
        x += alpha * p
        r -= alpha * Ap
        rs_new = float(np.vdot(r, r))
        p *= rs_new / rs
        p += r
        rs = rs_new
        res = np.sqrt(rs)
        iters += 1

    u = x + u_bc
    return u, CgInfo(iterations=iters, converged=bool(res <= threshold),
                     rel_residual=res / ref)


def screened_poisson_solve(rhs: GridFunction, bc: DirichletBC, lam: float,
                           x0: GridFunction | None = None,
                           settings: CgSettings | None = None,
                           ) -> tuple[GridFunction, CgInfo]:
    """Solve (lam*I - Lap_h) u = rhs at interior nodes with u = bc on the boundary.

    The residual target is ||(lam*I - Lap_h)u - rhs||_2 <= rel_tol*||rhs||_2;
    hitting max_iter first is reported through the returned CgInfo, not raised.
    """
    bc.check_spec(rhs.spec)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if not np.all(np.isfinite(rhs.values)):
        raise GridError("non-finite right-hand side")
    settings = settings or CgSettings()
    x0_values = x0.values if x0 is not None else None
    vals, info = screened_poisson_cg(rhs.values, bc, lam, x0_values, settings)
    return GridFunction(rhs.spec, vals), info


def poisson_solve_indicator(mask: GridFunction, bc: DirichletBC | None = None,
                            settings: CgSettings | None = None) -> GridFunction:
    """Solve -Lap_h v = mask with v = 0 on the box boundary.

    Used to build obstacle transforms of free-boundary problems; solved to
    tight tolerance since the result is constructed once and reused.
    """
    vals = mask.values
    if not np.all((vals == 0.0) | (vals == 1.0)):
        raise ValueError("indicator mask must take values in {0, 1}")
    if np.any(vals[mask.spec.boundary_mask()] != 0.0):
        warnings.warn("indicator support touches the box boundary; "
                      "the potential now depends on the box size", stacklevel=2)
    if bc is None:
        bc = DirichletBC.constant(mask.spec, 0.0)
    bc.check_spec(mask.spec)
    if settings is None:
        settings = CgSettings(rel_tol=1e-10, max_iter=40 * max(mask.spec.n) + 1000)
    u, info = screened_poisson_solve(mask, bc, 0.0, settings=settings)
    if not info.converged:
        warnings.warn(f"Poisson solve stopped at rel residual {info.rel_residual:.2e} "
                      f"after {info.iterations} iterations", stacklevel=2)
    return u
