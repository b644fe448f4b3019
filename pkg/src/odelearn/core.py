"""Shared value types: uniformly sampled trajectories and vector fields.

Everything downstream (residual construction, training, integration,
benchmarks) works in terms of the two types defined here.  Both are
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class OdelearnError(Exception):
    """Base class for every error raised by this package."""


class NonFiniteError(OdelearnError):
    """Data contains NaN or Inf where finite values are required."""


class TooShortError(OdelearnError):
    """Trajectory has fewer than two samples."""


class BadStepError(OdelearnError):
    """Time step is zero, negative, or non-finite."""


class DimensionMismatchError(OdelearnError):
    """State dimensions of two objects do not agree."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A uniformly sampled trajectory.

    Row ``n`` of ``states`` holds the state at time ``t0 + n * dt``.  All
    numerics are 64-bit floats; the state array is made read-only on
    construction.
    """

    t0: float
    dt: float
    states: np.ndarray

    def __post_init__(self) -> None:
        states = np.array(self.states, dtype=np.float64, order="C")
        if states.ndim != 2:
            raise ValueError(f"states must be 2-D (time by component), got ndim={states.ndim}")
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "states", _frozen(states))

    @property
    def n_samples(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def times(self) -> np.ndarray:
        """Sample times ``t0 + n * dt`` for ``n = 0 .. N-1``."""
        return self.t0 + self.dt * np.arange(self.n_samples, dtype=np.float64)

    def subsample(self, every: int) -> TimeSeries:
        """Keep every ``every``-th sample; the step grows by the same factor."""
        every = int(every)
        if every < 1:
            raise ValueError(f"subsample factor must be >= 1, got {every}")
        if every == 1:
            return self
        return TimeSeries(self.t0, self.dt * every, self.states[::every])

    def window(self, n_samples: int) -> TimeSeries:
        """The first ``n_samples`` rows as a new series on the same grid."""
        if not 2 <= n_samples <= self.n_samples:
            raise ValueError(f"window length {n_samples} outside [2, {self.n_samples}]")
        return TimeSeries(self.t0, self.dt, self.states[:n_samples])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.t0 == other.t0
            and self.dt == other.dt
            and self.states.shape == other.states.shape
            and bool(np.array_equal(self.states, other.states))
        )


def validate_timeseries(ts: TimeSeries) -> TimeSeries:
    """Check all trajectory invariants and return the input unchanged.

    Raises
    ------
    TooShortError
        Fewer than two samples.
    BadStepError
        ``dt`` not positive and finite.
    NonFiniteError
        ``t0`` or any state entry is NaN/Inf.
    """
    if ts.n_samples < 2:
        raise TooShortError(f"need at least 2 samples, got {ts.n_samples}")
    if ts.dim < 1:
        raise DimensionMismatchError("state dimension must be >= 1")
    if not np.isfinite(ts.dt) or ts.dt <= 0.0:
        raise BadStepError(f"dt must be positive and finite, got {ts.dt}")
    if not np.isfinite(ts.t0):
        raise NonFiniteError(f"t0 is not finite: {ts.t0}")
    if not np.isfinite(ts.states).all():
        raise NonFiniteError("states contain NaN or Inf")
    return ts


@dataclass(frozen=True, eq=False)
class VectorField:
    """A time-independent ODE right-hand side ``x -> dx/dt``.

    ``fn`` maps a length-``dim`` state to a length-``dim`` derivative and
    must be reentrant (no internal state), so fields can be evaluated
    concurrently.
    """

    dim: int
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise DimensionMismatchError(f"expected state of shape ({self.dim},), got {x.shape}")
        out = np.asarray(self.fn(x), dtype=np.float64)
        if out.shape != (self.dim,):
            raise DimensionMismatchError(
                f"vector field returned shape {out.shape}, expected ({self.dim},)"
            )
        return out

    def at_states(self, states: np.ndarray) -> np.ndarray:
        """Evaluate row-wise over an N x dim array of states."""
        states = np.asarray(states, dtype=np.float64)
        if states.ndim != 2 or states.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"expected states of shape (N, {self.dim}), got {states.shape}"
            )
        return np.stack([self(x) for x in states])
