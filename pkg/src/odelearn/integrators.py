"""Classical Runge-Kutta integration for data generation and rollout.

Fixed-step RK4 only: fixed grids keep every run deterministic and make
trajectories comparable across schemes.  Blow-ups never propagate NaN
rows; they raise :class:`NonFiniteStateError` carrying the index of the
last finite sample.
"""

from __future__ import annotations

import numpy as np

from .core import (
    BadStepError,
    DimensionMismatchError,
    NonFiniteError,
    OdelearnError,
    TimeSeries,
    VectorField,
)
from .model import MlpModel


class NonFiniteStateError(OdelearnError):
    """The integrated trajectory left the finite floats.

    ``last_finite_index`` is the row index of the last finite state that
    was produced before the blow-up.
    """

    def __init__(self, message: str, last_finite_index: int):
        super().__init__(message)
        self.last_finite_index = last_finite_index


def _rk4_step(f: VectorField, x: np.ndarray, h: float) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_rk4(
    f: VectorField,
    x0: np.ndarray,
    dt: float,
    steps: int,
    t0: float = 0.0,
    substeps: int = 1,
) -> TimeSeries:
    """Integrate ``xdot = f(x)`` on a uniform grid with classical RK4.

    Returns ``steps + 1`` samples starting at ``x0``; row n sits at time
    ``t0 + n * dt`` exactly.  With ``substeps > 1`` each reported step is
    taken as that many internal RK4 steps of size ``dt / substeps``, which
    is how ground-truth benchmark data is produced (the data error must
    sit far below the multistep residual scale).
    """
    x0 = np.asarray(x0, dtype=np.float64)
    return _integrate(f, x0, dt, steps, t0, substeps)


def _integrate(
    f: VectorField, x0: np.ndarray, dt: float, steps: int, t0: float, substeps: int
) -> TimeSeries:
    if x0.shape != (f.dim,):
        raise DimensionMismatchError(f"x0 has shape {x0.shape}, field dim is {f.dim}")
    if not np.isfinite(x0).all():
        raise NonFiniteError("initial state is not finite")
    if not (np.isfinite(dt) and dt > 0):
        raise BadStepError(f"dt must be positive and finite, got {dt}")
    steps = int(steps)
    if steps < 1:
        raise BadStepError(f"steps must be >= 1, got {steps}")
    substeps = int(substeps)
    if substeps < 1:
        raise BadStepError(f"substeps must be >= 1, got {substeps}")

    h = dt / substeps
    out = np.empty((steps + 1, f.dim), dtype=np.float64)
    out[0] = x0
    x = x0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(steps):
            for _ in range(substeps):
                x = _rk4_step(f, x, h)
            if not np.isfinite(x).all():
                raise NonFiniteStateError(
                    f"state became non-finite between samples {n} and {n + 1}",
                    last_finite_index=n,
                )
            out[n + 1] = x
    return TimeSeries(t0=t0, dt=dt, states=out)


def rollout(
    model: MlpModel,
    x0: np.ndarray,
    dt: float,
    steps: int,
    substeps: int = 10,
    t0: float = 0.0,
) -> TimeSeries:
    """Integrate a learned field on the grid the model was trained on.

    RK4 at internal step ``dt / substeps``, reporting states every ``dt``
    so the output grid matches the training grid.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    return _integrate(model.as_vector_field(), x0, dt, steps, t0, substeps)
