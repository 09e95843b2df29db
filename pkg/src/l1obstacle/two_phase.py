"""Two-phase membrane solver and zero-set structure extraction.

The objective sum (1/2)|grad_h u|^2 + mu1 u_+ - mu2 u_- - f u is rewritten
with alpha = (mu1 - mu2)/2 - f and beta = (mu1 + mu2)/2, using
u_+ = (u + |u|)/2 and u_- = (u - |u|)/2, which turns the nonsmooth part into a
plain weighted |u| term.  The split-Bregman sweep is then

    u <- solve (lam*I - Lap_h) u = lam*(v - b) - alpha
    v <- shrink(u + b, beta/lam)
    b <- b + u - v
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .contours import FreeBoundary, contour_polylines
from .grid import (DirichletBC, GridError, GridFunction, GridSpec,
                   dirichlet_energy)
from .obstacle import ObstacleProblem, SolverParams, solve_linear_obstacle
from .report import SolveFailure, SolveReport
from .shrink import shrink


@dataclass
class TwoPhaseProblem:
    spec: GridSpec
    mu1: GridFunction
    mu2: GridFunction
    bc: DirichletBC
    source: GridFunction | None = None

    def __post_init__(self):
        if isinstance(self.mu1, (int, float)):
            self.mu1 = GridFunction.constant(self.spec, self.mu1)
        if isinstance(self.mu2, (int, float)):
            self.mu2 = GridFunction.constant(self.spec, self.mu2)
        if self.mu1.spec != self.spec or self.mu2.spec != self.spec:
            raise GridError("phase weights defined on a different grid")
        if np.min(self.mu1.values) <= 0 or np.min(self.mu2.values) <= 0:
            raise ValueError("phase weights must be positive everywhere")
        self.bc.check_spec(self.spec)
        if self.source is not None and self.source.spec != self.spec:
            raise GridError("source defined on a different grid")

    def alpha_beta(self) -> tuple[np.ndarray, np.ndarray]:
        alpha = 0.5 * (self.mu1.values - self.mu2.values)
        if self.source is not None:
            alpha = alpha - self.source.values
        beta = 0.5 * (self.mu1.values + self.mu2.values)
        return alpha, beta


def two_phase_energy(p: TwoPhaseProblem, u_values: np.ndarray) -> float:
    cell = p.spec.h ** p.spec.dim
    e = dirichlet_energy(GridFunction(p.spec, u_values))
    e += cell * float(np.sum(p.mu1.values * np.maximum(u_values, 0.0)))
    e -= cell * float(np.sum(p.mu2.values * np.minimum(u_values, 0.0)))
    if p.source is not None:
        e -= cell * float(np.sum(p.source.values * u_values))
    return e


def solve_two_phase(p: TwoPhaseProblem, params: SolverParams,
                    u0: GridFunction | None = None, callback=None) -> SolveReport:
    """Iterate the sweep until successive iterates agree to tol in the max norm."""
    from .poisson import screened_poisson_cg

    spec = p.spec
    alpha, beta = p.alpha_beta()
    lam = params.lam

    u = (u0.values if u0 is not None else np.zeros(spec.shape)).copy()
    p.bc.apply(u)
    v = np.zeros(spec.shape)
    b = np.zeros(spec.shape)

    history: list[tuple[int, float, float]] = []
    converged = False
    start = time.perf_counter()
    it = 0
    for it in range(1, params.max_outer + 1):
        rhs = lam * (v - b) - alpha
        u_new, _ = screened_poisson_cg(rhs, p.bc, lam, u, params.cg)
        v = shrink(u_new + b, beta / lam)
        b = b + u_new - v

        diff = float(np.max(np.abs(u_new - u)))
        if not np.isfinite(diff) or not np.all(np.isfinite(u_new)):
            partial = SolveReport(u=GridFunction(spec, np.nan_to_num(u_new)),
                                  outer_iters=it, history=history, converged=False,
                                  wall_time=time.perf_counter() - start)
            raise SolveFailure(f"non-finite iterate at outer step {it}", partial)
        history.append((it, diff, two_phase_energy(p, u_new)))
        u = u_new
        if callback is not None:
            callback(it, u)
        if diff <= params.tol:
            converged = True
            break

    return SolveReport(u=GridFunction(spec, u), outer_iters=it, history=history,
                       converged=converged, feasibility_violation=0.0,
                       complementarity=None, wall_time=time.perf_counter() - start)


def extract_zero_structure(u: GridFunction, eps: float,
                           ) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[FreeBoundary]]:
    """Partition nodes into u > eps / u < -eps / |u| <= eps and trace both interfaces.

    The interfaces are the level sets u = +eps and u = -eps (crossing points
    in 1D, marching-squares polylines in 2D).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    plus_mask = u.values > eps
    minus_mask = u.values < -eps
    zero_mask = ~plus_mask & ~minus_mask
    interfaces = [contour_polylines(u, eps), contour_polylines(u, -eps)]
    return plus_mask, minus_mask, zero_mask, interfaces


def l1_vs_constrained_gap(f: GridFunction, mu: float,
                          params: SolverParams | None = None,
                          tol: float = 1e-8) -> float:
    """Max-norm gap between the constrained nonnegative minimizer and the
    positive part of the weighted-|u| minimizer.

    Solves (a) min sum (1/2)|grad u|^2 - f u + mu|u| with zero boundary data
    and (b) the same objective restricted to u >= 0, which is the classical
    obstacle problem with zero obstacle and source f - mu.  The two agree when
    the gap vanishes; for f >= 0 the unconstrained minimizer is itself
    nonnegative.
    """
    spec = f.spec
    bc = DirichletBC.constant(spec, 0.0)
    if params is None:
        params = SolverParams(mu=mu, lam=0.5 * mu, tol=tol)

    penalized = solve_two_phase(
        TwoPhaseProblem(spec, GridFunction.constant(spec, mu),
                        GridFunction.constant(spec, mu), bc, source=f),
        params)

    # on u >= 0 the |u| term is linear, so it folds into the source
    shifted = GridFunction(spec, f.values - mu)
    # penalty weight must dominate the multiplier mu - f on the contact set
    mu_pen = 1.05 * (mu + max(0.0, float(np.max(-f.values)))) + 1.0
    constrained = solve_linear_obstacle(
        ObstacleProblem(spec, GridFunction.constant(spec, 0.0), bc, source=shifted),
        SolverParams(mu=mu_pen, tol=params.tol))

    u_plus = np.maximum(penalized.u.values, 0.0)
    return float(np.max(np.abs(constrained.u.values - u_plus)))
