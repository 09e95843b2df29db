"""Solve reports shared by all iterative schemes."""

from __future__ import annotations

from dataclasses import dataclass, field

from .grid import GridFunction


class SolveFailure(RuntimeError):
    """Iteration produced non-finite values or diverged; carries the partial report."""

    def __init__(self, message: str, report: "SolveReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass
class SolveReport:
    u: GridFunction
    outer_iters: int
    history: list[tuple[int, float, float]] = field(default_factory=list)
    converged: bool = False
    feasibility_violation: float = 0.0
    complementarity: float | None = None
    wall_time: float = 0.0

    def last_diff(self) -> float:
        return self.history[-1][1] if self.history else float("inf")

    def write_history_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iter,diff,energy\n")
            for it, diff, energy in self.history:
                fh.write(f"{it},{diff:.17g},{energy:.17g}\n")
