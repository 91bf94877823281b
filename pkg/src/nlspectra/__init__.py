"""Bound states and dynamics of the 1-D nonlinear Schroedinger equation.

Stationary states are read as orbits of a classical particle (x as time,
psi as position); bound states are found by shooting between the vanishing
cues of that particle, and the time-dependent equation is integrated with a
symplectic scheme on a grid.
"""

from .model import (DIVERGENT, Bump, BumpSum, DeltaNotSamplable, DeltaWell, ModelError, Nonlinearity,
                    NonlinearityKind, RectWell, ZeroPotential, regularized_delta)

__all__ = [
    "DIVERGENT", "Bump", "BumpSum", "DeltaNotSamplable", "DeltaWell", "ModelError", "Nonlinearity",
    "NonlinearityKind", "RectWell", "ZeroPotential", "regularized_delta",
]
