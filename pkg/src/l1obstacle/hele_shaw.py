"""Hele-Shaw flow at a fixed time via the obstacle transform and a double-penalty sweep.

A source-driven free boundary problem -Lap u = f - gamma in {u > 0} turns into
an obstacle problem for w = u + phi with phi = -(gamma/2d)|x|^2 - InvLap(f):
w is the least superharmonic majorant of phi, so the free boundary of u is the
contact boundary of w.  For Hele-Shaw injection through a slot K at unit rate,
the time-integrated pressure at time t uses phi0 built from the initial fluid
indicator and the slot condition enters as a lift of the obstacle on K:
phi = phi0 + t*chi_K.  The sweep enforces w >= phi through one penalty and
bounds the overshoot above t*chi_K through a second one:

    u  <- solve ((lam1+lam2) I - Lap_h) u = lam1*(phi - v1 - b1) + lam2*(v2 + t*chi_K + b2)
    v1 <- shrink_plus(phi - u - b1, gamma1/lam1)
    v2 <- shrink_plus(u - t*chi_K - b2, gamma2/lam2)
    b1 <- b1 + v1 - phi + u
    b2 <- b2 + v2 - u + t*chi_K

The free-space inverse Laplacian is replaced by the zero-Dirichlet box
inverse, with the outer boundary held at phi0 so the physical field
u_phys = w - phi0 vanishes far from the fluid.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .contours import FreeBoundary, contour_polylines
from .grid import (DirichletBC, GridError, GridFunction, GridSpec,
                   dirichlet_energy)
from .poisson import CgSettings, poisson_solve_indicator, screened_poisson_cg
from .report import SolveFailure, SolveReport
from .shrink import shrink_plus


@dataclass
class HeleShawSetup:
    spec: GridSpec
    K_mask: GridFunction
    omega0_mask: GridFunction
    t: float
    _phi0: GridFunction | None = field(default=None, repr=False, compare=False)

    def phi0(self) -> GridFunction:
        """Base obstacle from the initial fluid indicator (cached; one tight solve)."""
        if self._phi0 is None:
            self._phi0 = transform_fbp_to_obstacle(self.omega0_mask, 1.0)
        return self._phi0

    def __post_init__(self):
        if self.K_mask.spec != self.spec or self.omega0_mask.spec != self.spec:
            raise GridError("masks defined on a different grid")
        if self.t < 0:
            raise ValueError("time must be nonnegative")
        k, om = self.K_mask.values, self.omega0_mask.values
        if np.any((k == 1.0) & (om == 0.0)):
            raise ValueError("injection slot K must lie inside the initial fluid")
        if np.any(om[self.spec.boundary_mask()] != 0.0):
            raise ValueError("initial fluid must stay strictly inside the box")


@dataclass
class DoublePenaltyParams:
    gamma1: float = 1.5e4
    gamma2: float = 1.5e4
    lambda1: float = 150.0
    lambda2: float = 150.0
    tol: float = 1e-6
    max_outer: int = 20000
    cg: CgSettings = field(default_factory=CgSettings)

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "lambda1", "lambda2", "tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def transform_fbp_to_obstacle(f: GridFunction, gamma: float) -> GridFunction:
    """phi = -(gamma/2d)|x|^2 - InvLap(f) with the zero-Dirichlet box inverse."""
    spec = f.spec
    coords = spec.meshgrid()
    sq = sum(c * c for c in coords)
    potential = poisson_solve_indicator(f) if np.any(f.values != 0.0) \
        else GridFunction.constant(spec, 0.0)
    return GridFunction(spec, -(gamma / (2.0 * spec.dim)) * sq - potential.values)


def build_hs_obstacle(s: HeleShawSetup) -> GridFunction:
    """phi0 + t*chi_K, with phi0 from the initial fluid indicator at unit gamma."""
    return GridFunction(s.spec, s.phi0().values + s.t * s.K_mask.values)


def hs_energy(spec: GridSpec, u: np.ndarray, phi: np.ndarray, t_chi: np.ndarray,
              params: DoublePenaltyParams) -> float:
    cell = spec.h ** spec.dim
    e = dirichlet_energy(GridFunction(spec, u))
    e += params.gamma1 * cell * float(np.sum(np.maximum(phi - u, 0.0)))
    e += params.gamma2 * cell * float(np.sum(np.maximum(u - t_chi, 0.0)))
    return e


def solve_hele_shaw(s: HeleShawSetup, params: DoublePenaltyParams | None = None,
                    callback=None) -> SolveReport:
    """Converged w field; the physical pressure integral is u_phys = w - phi0.

    The report's u is the w field; feasibility is max(phi - w)_+.
    """
    params = params or DoublePenaltyParams()
    spec = s.spec
    phi0 = s.phi0()
    t_chi = s.t * s.K_mask.values
    phi = phi0.values + t_chi
    bc = DirichletBC.from_grid_function(phi0)
    lam1, lam2 = params.lambda1, params.lambda2

    u = phi.copy()
    bc.apply(u)
    v1 = phi - u                 # zero away from the boundary ring
    v2 = u - t_chi
    b1 = np.zeros(spec.shape)
    b2 = np.zeros(spec.shape)

    history: list[tuple[int, float, float]] = []
    converged = False
    start = time.perf_counter()
    it = 0
    for it in range(1, params.max_outer + 1):
        rhs = lam1 * (phi - v1 - b1) + lam2 * (v2 + t_chi + b2)
        u_new, _ = screened_poisson_cg(rhs, bc, lam1 + lam2, u, params.cg)
        v1 = shrink_plus(phi - u_new - b1, params.gamma1 / lam1)
        v2 = shrink_plus(u_new - t_chi - b2, params.gamma2 / lam2)
        b1 = b1 + v1 - phi + u_new
        b2 = b2 + v2 - u_new + t_chi

        diff = float(np.max(np.abs(u_new - u)))
        if not np.isfinite(diff) or not np.all(np.isfinite(u_new)):
            partial = SolveReport(u=GridFunction(spec, np.nan_to_num(u_new)),
                                  outer_iters=it, history=history, converged=False,
                                  wall_time=time.perf_counter() - start)
            raise SolveFailure(f"non-finite iterate at outer step {it}", partial)
        history.append((it, diff, hs_energy(spec, u_new, phi, t_chi, params)))
        u = u_new
        if callback is not None:
            callback(it, u)
        if diff <= params.tol:
            converged = True
            break

    feas = float(np.max(np.maximum(phi - u, 0.0)))
    return SolveReport(u=GridFunction(spec, u), outer_iters=it, history=history,
                       converged=converged, feasibility_violation=feas,
                       complementarity=None, wall_time=time.perf_counter() - start)


def physical_pressure_integral(s: HeleShawSetup, report: SolveReport) -> GridFunction:
    """u_phys = w - phi0, nonnegative up to solver tolerance."""
    return GridFunction(s.spec, report.u.values - s.phi0().values)


def exact_circle_radius(t: float, rK: float, r0: float, r_max: float = 100.0) -> float:
    """Fluid radius for concentric circular slot/initial data.

    The radial profile is a1*log(r/rK) + t on [rK, r0] (harmonic, u = t on the
    slot) and r^2/4 + a2*log(r) + b2 on [r0, R] (from -Lap u = -1), matched in
    value and slope at r0 with u(R) = u'(R) = 0, which forces a2 = -R^2/2.
    Eliminating the constants leaves one scalar equation, solved by bisection.
    """
    if not (0 < rK < r0):
        raise ValueError("need 0 < rK < r0")
    if t < 0:
        raise ValueError("time must be nonnegative")
    if t == 0:
        return r0

    def g(R):
        return ((r0**2 - R**2) / 4.0 + (R**2 / 2.0) * np.log(R / r0)
                - ((r0**2 - R**2) / 2.0) * np.log(r0 / rK) - t)

    if g(r_max) < 0:
        raise ValueError(f"no fluid radius below r_max={r_max}; t too large")
    return float(bisect(g, r0, r_max, xtol=1e-10))


def extract_free_boundary(u_phys: GridFunction, eps: float) -> FreeBoundary:
    """Contour of u_phys = eps; empty when the field never exceeds eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if float(np.max(u_phys.values)) <= eps:
        return FreeBoundary(level=eps, components=[],
                            mask=np.zeros(u_phys.spec.shape, dtype=bool))
    return contour_polylines(u_phys, eps)
