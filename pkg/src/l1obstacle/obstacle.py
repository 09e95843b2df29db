"""Split-Bregman solver for the linear obstacle problem.

Minimizes the discrete energy

    sum_j (1/2)|grad_h u_j|^2 - f_j u_j + mu (phi_j - u_j)_+

over fields with Dirichlet data g >= phi on the boundary.  The constraint
u >= phi is handled by the exact penalty; introducing v = phi - u and a
Bregman variable b decouples each sweep into a screened Poisson solve, a
one-sided shrink, and an additive update:

    u <- solve (lam*I - Lap_h) u = lam*(phi - v - b) + f
    v <- shrink_plus(phi - u - b, mu/lam)
    b <- b + u + v - phi

The sweep stops when successive iterates agree to tol in the max norm.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .grid import (DirichletBC, GridError, GridFunction, GridSpec,
                   dirichlet_energy, laplacian)
from .poisson import CgSettings, screened_poisson_cg
from .report import SolveFailure, SolveReport
from .shrink import mu_lower_bound, shrink_plus


@dataclass
class ObstacleProblem:
    spec: GridSpec
    phi: GridFunction
    bc: DirichletBC
    source: GridFunction | None = None

    def __post_init__(self):
        if self.phi.spec != self.spec:
            raise GridError("obstacle defined on a different grid")
        self.bc.check_spec(self.spec)
        if self.source is not None and self.source.spec != self.spec:
            raise GridError("source defined on a different grid")
        mask = self.spec.boundary_mask()
        gap = self.bc.values[mask] - self.phi.values[mask]
        if np.min(gap) < -1e-12:
            raise ValueError(f"infeasible boundary data: g < phi by {-np.min(gap):.3e}")

    def source_values(self) -> np.ndarray | float:
        return self.source.values if self.source is not None else 0.0


@dataclass
class SolverParams:
    """Penalty weight mu, splitting weight lam, and outer-loop controls.

    When lam is omitted it defaults to 0.15*mu; the splitting weight affects
    speed only, not the minimizer.
    """

    mu: float
    lam: float | None = None
    tol: float = 1e-6
    max_outer: int = 5000
    cg: CgSettings = field(default_factory=CgSettings)

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.lam is None:
            self.lam = 0.15 * self.mu
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


def default_params(problem: ObstacleProblem, tol: float = 1e-6,
                   margin: float = 1.05) -> SolverParams:
    """Auto-select mu from the discrete lower bound (times a safety margin)."""
    bound = mu_lower_bound(problem.phi, margin=margin)
    return SolverParams(mu=bound.mu, tol=tol)


def penalized_energy(problem: ObstacleProblem, u_values: np.ndarray, mu: float) -> float:
    spec = problem.spec
    u = GridFunction(spec, u_values)
    cell = spec.h ** spec.dim
    e = dirichlet_energy(u)
    e += mu * cell * float(np.sum(np.maximum(problem.phi.values - u_values, 0.0)))
    if problem.source is not None:
        e -= cell * float(np.sum(problem.source.values * u_values))
    return e


def solve_linear_obstacle(problem: ObstacleProblem, params: SolverParams | None = None,
                          u0: GridFunction | None = None,
                          callback=None) -> SolveReport:
    """Run the three-substep sweep until the outer max-norm criterion holds.

    u0 defaults to the obstacle itself.  Non-finite iterates raise
    SolveFailure with the history collected so far attached.
    """
    if params is None:
        params = default_params(problem)
    spec = problem.spec
    phi = problem.phi.values
    f = problem.source_values()
    mu, lam = params.mu, params.lam

    u = (u0.values if u0 is not None else phi).copy()
    problem.bc.apply(u)
    v = np.zeros(spec.shape)
    b = np.zeros(spec.shape)

    history: list[tuple[int, float, float]] = []
    converged = False
    start = time.perf_counter()
    it = 0
    for it in range(1, params.max_outer + 1):
        rhs = lam * (phi - v - b) + f
        u_new, _ = screened_poisson_cg(rhs, problem.bc, lam, u, params.cg)
        v = shrink_plus(phi - u_new - b, mu / lam)
        b = b + u_new + v - phi

        diff = float(np.max(np.abs(u_new - u)))
        if not np.isfinite(diff) or not np.all(np.isfinite(u_new)):
            partial = SolveReport(u=GridFunction(spec, np.nan_to_num(u_new)),
                                  outer_iters=it, history=history, converged=False,
                                  wall_time=time.perf_counter() - start)
            raise SolveFailure(f"non-finite iterate at outer step {it} "
                               f"(mu={mu:g}, lam={lam:g})", partial)
        energy = penalized_energy(problem, u_new, mu)
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


def kkt_residuals(problem: ObstacleProblem, u: GridFunction) -> tuple[float, float, float]:
    """(feasibility, subharmonicity, complementarity) residuals of a candidate field.

    feasibility      max (phi - u)_+ over all nodes
    subharmonicity   max interior (Lap_h u + f)_+, violation of -Lap u >= f
    complementarity  max interior |min(u - phi, -Lap_h u - f)|
    """
    spec = problem.spec
    f = problem.source_values()
    interior = spec.interior()
    lap = laplacian(u, problem.bc).values[interior]
    f_int = f[interior] if isinstance(f, np.ndarray) else f
    gap = (u.values - problem.phi.values)[interior]

    feasibility = float(np.max(np.maximum(problem.phi.values - u.values, 0.0)))
    subharmonicity = float(np.max(np.maximum(lap + f_int, 0.0)))
    complementarity = float(np.max(np.abs(np.minimum(gap, -lap - f_int))))
    return feasibility, subharmonicity, complementarity
