"""Pointwise shrink operators and the penalty-weight lower bound.

The one-sided shrink is the proximal map of c*max(v,0), the two-sided shrink
the proximal map of c*|v|.  The lower bound on the penalty weight mu is the
discrete positive part of -Lap_h(phi): any mu at or above it makes the
penalized minimizer coincide with the constrained one, and keeping mu close
to the bound speeds up the iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import DirichletBC, GridFunction, laplacian


def shrink_plus(z, c):
    """Minimizer of c*max(v,0) + (v-z)^2/2: z-c if z>c, z if z<0, else 0."""
    z = np.asarray(z, dtype=float)
    return np.where(z > c, z - c, np.minimum(z, 0.0))


def shrink(z, c):
    """Soft threshold (|z|-c)_+ sign(z), the minimizer of c|v| + (v-z)^2/2."""
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - c, 0.0)


@dataclass
class PenaltyBound:
    """Discrete lower bound for the penalty weight, with a safety margin."""

    mu_min: float
    margin: float = 1.05

    def __post_init__(self):
        if self.mu_min < 0:
            raise ValueError("mu_min must be nonnegative")
        if self.margin < 1.0:
            raise ValueError("margin must be >= 1")

    @property
    def mu(self) -> float:
        """Penalty weight to apply; a unit floor guards harmonic obstacles."""
        return max(self.margin * self.mu_min, 1.0)


def mu_lower_bound(phi: GridFunction, bc: DirichletBC | None = None,
                   margin: float = 1.05) -> PenaltyBound:
    """max(0, max interior -Lap_h(phi)), evaluated with phi's own trace by default.

    Obstacles with node-scale jumps give an O(h^-2) bound; that is the correct
    discrete scale and is not capped.
    """
    if bc is None:
        bc = DirichletBC.from_grid_function(phi)
    lap = laplacian(phi, bc).values
    interior = phi.spec.interior()
    return PenaltyBound(mu_min=max(0.0, float(np.max(-lap[interior]))), margin=margin)
