"""Fixture runner, refinement studies, and rate fitting.

This is the layer the CLI and the acceptance checks share: it dispatches a
named fixture to the right solver, compares against the fixture's reference
where one exists, and extracts the scalar measurements (contact radius,
free-boundary location, fluid radius) the experiments report.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any

import numpy as np

from .contours import FreeBoundary, area_radius, contour_polylines, mean_radius
from .grid import GridFunction, GridSpec, linf_diff
from .hele_shaw import (DoublePenaltyParams, HeleShawSetup,
                        physical_pressure_integral, solve_hele_shaw)
from .minimal_surface import NesterovSettings, solve_nonlinear_obstacle
from .obstacle import ObstacleProblem, SolverParams, solve_linear_obstacle
from .problems import NamedProblem, evaluate_reference, get
from .report import SolveReport
from .two_phase import TwoPhaseProblem, extract_zero_structure, solve_two_phase


@dataclass
class RunResult:
    problem_id: str
    spec: GridSpec
    params: Any
    report: SolveReport
    field: GridFunction                  # primary output field (u_phys for Hele-Shaw)
    reference_error: float | None = None
    boundary: FreeBoundary | None = None
    measurements: dict[str, float] = dataclasses.field(default_factory=dict)

    def effective_params(self) -> dict[str, float]:
        out = {}
        for f in dataclasses.fields(self.params):
            val = getattr(self.params, f.name)
            if isinstance(val, (int, float)):
                out[f.name] = float(val)
        return out


_PARAM_KEYS = {"mu", "lam", "tol", "max_outer", "gamma1", "gamma2",
               "lambda1", "lambda2", "t", "tau", "L", "inner_tol", "max_inner"}


def _apply_overrides(obj, overrides: dict[str, Any]):
    for key, val in overrides.items():
        if hasattr(obj, key):
            current = getattr(obj, key)
            setattr(obj, key, int(val) if isinstance(current, int) else float(val))
    return obj


def run_fixture(problem_id: str, n: int | None = None,
                overrides: dict[str, Any] | None = None,
                fixed_iters: int | None = None, callback=None) -> RunResult:
    """Solve one fixture; overrides replace individual solver parameters.

    fixed_iters forces exactly that many outer sweeps regardless of tolerance
    (used to reproduce iteration-count-based experiment reports).
    """
    overrides = dict(overrides or {})
    named = get(problem_id)
    spec = named.spec_for(int(n) if n is not None else named.default_n)
    problem = named.build(spec)
    params = named.params_for(spec)

    nes = None
    if named.kind == "nonlinear":
        params, nes = params
        nes = _apply_overrides(nes, overrides)
    if named.kind == "hele_shaw" and "t" in overrides:
        problem = dataclasses.replace(problem, t=float(overrides.pop("t")), _phi0=None)
    params = _apply_overrides(params, {k: v for k, v in overrides.items()
                                       if k in _PARAM_KEYS})
    if fixed_iters is not None:
        params.tol = 1e-300
        params.max_outer = int(fixed_iters)

    if named.kind == "obstacle":
        report = solve_linear_obstacle(problem, params, callback=callback)
        field = report.u
    elif named.kind == "nonlinear":
        report = solve_nonlinear_obstacle(problem, params, nes, callback=callback)
        field = report.u
    elif named.kind == "two_phase":
        report = solve_two_phase(problem, params, callback=callback)
        field = report.u
    elif named.kind == "hele_shaw":
        report = solve_hele_shaw(problem, params, callback=callback)
        field = physical_pressure_integral(problem, report)
    else:
        raise ValueError(f"unknown problem kind {named.kind!r}")

    result = RunResult(problem_id=problem_id, spec=spec, params=params,
                       report=report, field=field)
    _measure(named, problem, params, result)
    return result


def _measure(named: NamedProblem, problem, params, result: RunResult) -> None:
    spec = result.spec
    if named.reference is not None:
        result.reference_error = linf_diff(result.field, named.reference(spec))

    # the floor keeps set classification sane in fixed-iteration mode
    eps = max(10.0 * params.tol, 1e-10)
    if named.kind == "obstacle" and isinstance(problem, ObstacleProblem):
        gap = result.field.values - problem.phi.values
        contact = gap <= eps
        if spec.dim == 2 and np.any(contact):
            x, y = spec.meshgrid()
            result.measurements["contact_radius"] = float(
                np.max(np.hypot(x, y)[contact]))
            result.boundary = contour_polylines(
                GridFunction(spec, gap), eps)
    elif named.kind == "two_phase":
        plus, minus, zero, interfaces = extract_zero_structure(result.field, eps)
        if spec.dim == 1:
            x = spec.coords(0)
            if np.any(zero):
                result.measurements["zero_set_lo"] = float(np.min(x[zero]))
                result.measurements["zero_set_hi"] = float(np.max(x[zero]))
            crossings = contour_polylines(result.field, 0.0).all_points()
            if len(crossings) == 1:
                result.measurements["free_boundary_x"] = float(crossings[0, 0])
        else:
            result.boundary = interfaces[0]
            result.measurements["zero_cells"] = float(np.count_nonzero(zero))
    elif named.kind == "hele_shaw" and isinstance(problem, HeleShawSetup):
        from .hele_shaw import extract_free_boundary
        fb = extract_free_boundary(result.field, eps)
        result.boundary = fb
        if fb.components:
            result.measurements["mean_radius"] = mean_radius(fb)
            result.measurements["area_radius"] = area_radius(result.field, eps)


def fit_rate(errors: list[tuple[float, float]]) -> float:
    """Least-squares slope of log(error) against log(h)."""
    if len(errors) < 3:
        raise ValueError("need at least 3 (h, error) points")
    h = np.array([p[0] for p in errors], dtype=float)
    e = np.array([p[1] for p in errors], dtype=float)
    if np.any(h <= 0) or np.any(e <= 0):
        raise ValueError("spacings and errors must be positive")
    return float(np.polyfit(np.log(h), np.log(e), 1)[0])


@dataclass
class StudyRow:
    n: int
    h: float
    error: float
    measurements: dict[str, float]
    wall_time: float


@dataclass
class StudyResult:
    problem_id: str
    rows: list[StudyRow]
    rate: float | None


def _study_error(named: NamedProblem, result: RunResult) -> float:
    if named.kind == "hele_shaw":
        targets = named.targets() if named.targets else {}
        if "exact_radius" not in targets:
            raise ValueError(f"no radius reference for {named.id!r}")
        return abs(result.measurements["mean_radius"] - targets["exact_radius"][0])
    if result.reference_error is None:
        raise ValueError(f"fixture {named.id!r} has no reference to measure error against")
    return result.reference_error


def refinement_study(problem_id: str, n_list: list[int],
                     overrides: dict[str, Any] | None = None) -> StudyResult:
    """Solve at each grid size and fit the error-vs-h rate."""
    named = get(problem_id)
    rows = []
    for n in n_list:
        result = run_fixture(problem_id, n=n, overrides=overrides)
        rows.append(StudyRow(n=n, h=result.spec.h, error=_study_error(named, result),
                             measurements=dict(result.measurements),
                             wall_time=result.report.wall_time))
    rate = None
    if len(rows) >= 3 and all(r.error > 0 for r in rows):
        rate = fit_rate([(r.h, r.error) for r in rows])
    return StudyResult(problem_id=problem_id, rows=rows, rate=rate)


def time_sweep(problem_id: str, t_list: list[float], n: int | None = None,
               overrides: dict[str, Any] | None = None) -> list[RunResult]:
    """Independent solves at each time value (no time stepping)."""
    named = get(problem_id)
    if named.kind != "hele_shaw":
        raise ValueError("time sweeps apply to Hele-Shaw fixtures only")
    results = []
    for t in t_list:
        ov = dict(overrides or {})
        ov["t"] = float(t)
        results.append(run_fixture(problem_id, n=n, overrides=ov))
    return results
