"""Minimal-surface obstacle problem solved with a Nesterov-accelerated inner loop.

The surface energy sum_cells sqrt(1 + |grad_h u|^2) has a nonlinear first
variation, so the smooth substep of the split-Bregman sweep is no longer a
linear solve.  It is instead minimized by accelerated gradient descent on

    F(U) = surface energy density + (lam/2)(v - phi + U + b)^2,

which is lam-strongly convex; the momentum weight (sqrt(L)-sqrt(lam)) /
(sqrt(L)+sqrt(lam)) gives the geometric rate (1 - sqrt(lam/L)) per step.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .grid import DirichletBC, GridFunction, GridSpec
from .obstacle import ObstacleProblem, SolverParams, kkt_residuals
from .report import SolveFailure, SolveReport
from .shrink import shrink_plus


@dataclass
class NesterovSettings:
    """Inner-loop controls; tau must not exceed 1/L."""

    L: float
    tau: float | None = None
    inner_tol: float = 1e-7
    max_inner: int = 200_000
    divergence_patience: int = 50

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.tau is None:
            self.tau = 1.0 / self.L
        if not (0 < self.tau <= 1.0 / self.L + 1e-15):
            raise ValueError("tau must lie in (0, 1/L]")

    @classmethod
    def for_grid(cls, spec: GridSpec, lam: float, tol: float = 1e-6) -> "NesterovSettings":
        # default curvature estimate: lam coupling plus 2d/h^2 for the surface term
        L = lam + 2.0 * spec.dim / spec.h**2
        return cls(L=L, inner_tol=tol / 10.0)


def _cell_gradients(values: np.ndarray, h: float) -> list[np.ndarray]:
    """Forward differences anchored at cell lower corners, all of shape (n-1)^d."""
    dim = values.ndim
    grads = []
    for ax in range(dim):
        sl = tuple(slice(0, -1) if k != ax else slice(None) for k in range(dim))
        grads.append(np.diff(values, axis=ax)[sl] / h)
    return grads


def surface_energy(u: GridFunction) -> float:
    """h^d * sum over cells of sqrt(1 + |grad_h u|^2)."""
    grads = _cell_gradients(u.values, u.spec.h)
    sq = np.zeros_like(grads[0])
    for g in grads:
        sq += g * g
    return u.spec.h ** u.spec.dim * float(np.sum(np.sqrt(1.0 + sq)))


def minimal_surface_gradient_values(values: np.ndarray, h: float) -> np.ndarray:
    """First variation density of the surface energy; zero at boundary nodes.

    With q the normalized cell gradient, the value at node m is the negative
    backward-difference divergence sum_k (q_k(m) - q_k(m - e_k))/h, with q
    treated as zero outside the cell range.  For small fields this reduces to
    -Lap_h at interior nodes.
    """
    dim = values.ndim
    grads = _cell_gradients(values, h)
    sq = np.zeros_like(grads[0])
    for g in grads:
        sq += g * g
    w = np.sqrt(1.0 + sq)

    cells = (slice(0, -1),) * dim
    out = np.zeros_like(values)
    for ax in range(dim):
        q = np.zeros(values.shape)
        q[cells] = grads[ax] / w
        q_shift = np.zeros_like(q)
        dst = tuple(slice(1, None) if k == ax else slice(None) for k in range(dim))
        src = tuple(slice(0, -1) if k == ax else slice(None) for k in range(dim))
        q_shift[dst] = q[src]
        out += (q_shift - q) / h
    # Dirichlet nodes are not unknowns
    boundary = np.zeros(values.shape, dtype=bool)
    for ax in range(dim):
        boundary[tuple(0 if k == ax else slice(None) for k in range(dim))] = True
        boundary[tuple(-1 if k == ax else slice(None) for k in range(dim))] = True
    out[boundary] = 0.0
    return out


def minimal_surface_gradient(w: GridFunction, bc: DirichletBC) -> GridFunction:
    bc.check_spec(w.spec)
    return GridFunction(w.spec, minimal_surface_gradient_values(w.values, w.spec.h))


def nesterov_minimize(grad_fn, x0: np.ndarray, lam: float, nes: NesterovSettings,
                      free_mask: np.ndarray, objective_fn=None,
                      ) -> tuple[np.ndarray, int]:
    """Accelerated gradient descent restricted to the free (non-Dirichlet) nodes.

    grad_fn(x) must return the full gradient of the lam-strongly-convex
    objective; entries outside free_mask are ignored.  If objective_fn is
    given, a sustained energy increase is treated as divergence.
    """
    beta = (np.sqrt(nes.L) - np.sqrt(lam)) / (np.sqrt(nes.L) + np.sqrt(lam))
    u = x0.copy()
    u_prev = x0.copy()
    bad_steps = 0
    last_obj = objective_fn(u) if objective_fn is not None else None
    k = 0
    for k in range(1, nes.max_inner + 1):
        w = u + beta * (u - u_prev)
        g = grad_fn(w)
        u_next = w - nes.tau * g
        u_next[~free_mask] = x0[~free_mask]
        step = float(np.max(np.abs(u_next - u)))
        u_prev = u
        u = u_next
        if not np.isfinite(step):
            raise SolveFailure(f"non-finite inner iterate at step {k}")
        if objective_fn is not None:
            obj = objective_fn(u)
            bad_steps = bad_steps + 1 if obj > last_obj + 1e-12 else 0
            last_obj = obj
            if bad_steps >= nes.divergence_patience:
                raise SolveFailure(f"inner energy increased for {bad_steps} "
                                   f"consecutive steps (tau={nes.tau:g}, L={nes.L:g})")
        if step <= nes.inner_tol:
            break
    return u, k


def solve_nonlinear_obstacle(problem: ObstacleProblem, params: SolverParams,
                             nes: NesterovSettings | None = None,
                             u0: GridFunction | None = None,
                             callback=None) -> SolveReport:
    """Split-Bregman sweep with the smooth substep run by the Nesterov loop."""
    spec = problem.spec
    if nes is None:
        nes = NesterovSettings.for_grid(spec, params.lam, params.tol)
    phi = problem.phi.values
    mu, lam, h = params.mu, params.lam, spec.h

    u = (u0.values if u0 is not None else phi).copy()
    problem.bc.apply(u)
    v = np.zeros(spec.shape)
    b = np.zeros(spec.shape)
    free = ~spec.boundary_mask()
    cell = h ** spec.dim

    history: list[tuple[int, float, float]] = []
    converged = False
    start = time.perf_counter()
    it = 0
    for it in range(1, params.max_outer + 1):
        target = phi - v - b

        def grad_fn(x):
            return minimal_surface_gradient_values(x, h) + lam * (x - target)

        def objective_fn(x):
            gf = GridFunction(spec, x)
            return surface_energy(gf) + 0.5 * lam * cell * float(np.sum((x - target)[free]**2))

        u_new, _ = nesterov_minimize(grad_fn, u, lam, nes, free, objective_fn)
        v = shrink_plus(phi - u_new - b, mu / lam)
        b = b + u_new + v - phi

        diff = float(np.max(np.abs(u_new - u)))
        energy = surface_energy(GridFunction(spec, u_new)) + \
            mu * cell * float(np.sum(np.maximum(phi - u_new, 0.0)))
        history.append((it, diff, energy))
        u = u_new
        if callback is not None:
            callback(it, u)
        if diff <= params.tol:
            converged = True
            break

    wall = time.perf_counter() - start
    u_fn = GridFunction(spec, u)
    feas, _, compl_ = kkt_residuals(problem, u_fn)
    return SolveReport(u=u_fn, outer_iters=it, history=history, converged=converged,
                       feasibility_violation=feas, complementarity=compl_,
                       wall_time=wall)
