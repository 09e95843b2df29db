"""Finite-difference solvers for obstacle and free-boundary problems.

The constraint u >= phi is replaced by an exact one-sided L1 penalty; for any
penalty weight at or above max(0, -Lap phi) the unconstrained minimizer equals
the constrained one.  Split-Bregman sweeps reduce each problem to screened
Poisson solves plus pointwise shrinks, which also covers the two-phase
membrane and (through an obstacle transform) Hele-Shaw flow.
"""

from .contours import FreeBoundary, area_radius, contour_polylines, mean_radius
from .grid import (DirichletBC, GridError, GridFunction, GridSpec,
                   dirichlet_energy, gradient_forward, laplacian, linf_diff)
from .hele_shaw import (DoublePenaltyParams, HeleShawSetup, build_hs_obstacle,
                        exact_circle_radius, extract_free_boundary,
                        physical_pressure_integral, solve_hele_shaw,
                        transform_fbp_to_obstacle)
from .minimal_surface import (NesterovSettings, minimal_surface_gradient,
                              solve_nonlinear_obstacle, surface_energy)
from .obstacle import (ObstacleProblem, SolverParams, default_params,
                       kkt_residuals, solve_linear_obstacle)
from .poisson import (CgInfo, CgSettings, poisson_solve_indicator,
                      screened_poisson_solve)
from .report import SolveFailure, SolveReport
from .shrink import PenaltyBound, mu_lower_bound, shrink, shrink_plus
from .studies import fit_rate, refinement_study, run_fixture, time_sweep
from .two_phase import (TwoPhaseProblem, extract_zero_structure,
                        l1_vs_constrained_gap, solve_two_phase)

__all__ = [
    "CgInfo", "CgSettings", "DirichletBC", "DoublePenaltyParams",
    "FreeBoundary", "GridError", "GridFunction", "GridSpec", "HeleShawSetup",
    "NesterovSettings", "ObstacleProblem", "PenaltyBound", "SolveFailure",
    "SolveReport", "SolverParams", "TwoPhaseProblem", "area_radius",
    "build_hs_obstacle", "contour_polylines", "default_params",
    "dirichlet_energy", "exact_circle_radius", "extract_free_boundary",
    "extract_zero_structure", "fit_rate", "gradient_forward", "kkt_residuals",
    "l1_vs_constrained_gap", "laplacian", "linf_diff", "mean_radius",
    "minimal_surface_gradient", "mu_lower_bound", "physical_pressure_integral",
    "poisson_solve_indicator", "refinement_study", "run_fixture",
    "screened_poisson_solve", "shrink", "shrink_plus", "solve_hele_shaw",
    "solve_linear_obstacle", "solve_nonlinear_obstacle", "solve_two_phase",
    "surface_energy", "time_sweep", "transform_fbp_to_obstacle",
]

__version__ = "0.1.0"
