"""Linear multistep scheme tables and residual construction.

A scheme with step count M is stored as coefficient vectors (alpha, beta)
of length M+1 in the convention

    sum_m [ alpha_m * x_{n-m} + dt * beta_m * f(x_{n-m}) ] = 0,

with alpha_0 = -1 on the newest sample, so e.g. the trapezoidal rule is
alpha = [-1, 1], beta = [0.5, 0.5].  Schemes are used purely as residual
templates over observed states: nothing here ever solves an implicit
equation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import DimensionMismatchError, OdelearnError, TimeSeries, VectorField, _frozen


class UnsupportedStepsError(OdelearnError):
    """Step count outside the shipped table (1..5)."""


class InsufficientSamplesError(OdelearnError):
    """Trajectory too short for the scheme's history window."""


class EmptyInputError(OdelearnError):
    """An operation received an empty matrix or grid."""


class SchemeFamily(Enum):
    ADAMS_BASHFORTH = "adams_bashforth"
    ADAMS_MOULTON = "adams_moulton"
    BDF = "bdf"

    @classmethod
    def parse(cls, name: "str | SchemeFamily") -> "SchemeFamily":
        """Accept short CLI tags (ab, am, bdf) as well as full names."""
        if isinstance(name, SchemeFamily):
            return name
        key = name.strip().lower().replace("-", "_")
        aliases = {
            "ab": cls.ADAMS_BASHFORTH,
            "adams_bashforth": cls.ADAMS_BASHFORTH,
            "am": cls.ADAMS_MOULTON,
            "adams_moulton": cls.ADAMS_MOULTON,
            "trapezoidal": cls.ADAMS_MOULTON,
            "bdf": cls.BDF,
        }
        if key not in aliases:
            raise ValueError(f"unknown scheme family: {name!r}")
        return aliases[key]

    @property
    def short(self) -> str:
        return {"adams_bashforth": "ab", "adams_moulton": "am", "bdf": "bdf"}[self.value]


MAX_STEPS = 5

# Hard-coded coefficient tables (closed-form values, cross-checked by the
# polynomial-exactness tests).  Adams entries are the beta weights on
# f(x_{n-1}) .. f(x_{n-M}) (Bashforth) or f(x_n) .. f(x_{n-M}) (Moulton);
# BDF entries are the history weights plus the single beta_0.
_AB_BETA = {
    1: [1.0],
    2: [3 / 2, -1 / 2],
    3: [23 / 12, -16 / 12, 5 / 12],
    4: [55 / 24, -59 / 24, 37 / 24, -9 / 24],
    5: [1901 / 720, -2774 / 720, 2616 / 720, -1274 / 720, 251 / 720],
}
_AM_BETA = {
    1: [1 / 2, 1 / 2],
    2: [5 / 12, 8 / 12, -1 / 12],
    3: [9 / 24, 19 / 24, -5 / 24, 1 / 24],
    4: [251 / 720, 646 / 720, -264 / 720, 106 / 720, -19 / 720],
    5: [475 / 1440, 1427 / 1440, -798 / 1440, 482 / 1440, -173 / 1440, 27 / 1440],
}
_BDF_ALPHA_BETA0 = {
    1: ([1.0], 1.0),
    2: ([4 / 3, -1 / 3], 2 / 3),
    3: ([18 / 11, -9 / 11, 2 / 11], 6 / 11),
    4: ([48 / 25, -36 / 25, 16 / 25, -3 / 25], 12 / 25),
    5: ([300 / 137, -300 / 137, 200 / 137, -75 / 137, 12 / 137], 60 / 137),
}


@dataclass(frozen=True, eq=False)
class MultistepScheme:
    """Coefficients of one linear multistep scheme.

    ``alpha`` and ``beta`` have length ``steps + 1`` and are indexed by the
    lag m (0 = newest sample).  ``order`` is the classical order of
    accuracy; residuals of an order-p scheme on an exact solution shrink
    as O(dt^{p+1}).
    """

    family: SchemeFamily
    steps: int
    alpha: np.ndarray
    beta: np.ndarray
    order: int

    def __post_init__(self) -> None:
        alpha = np.array(self.alpha, dtype=np.float64)
        beta = np.array(self.beta, dtype=np.float64)
        if alpha.shape != (self.steps + 1,) or beta.shape != (self.steps + 1,):
            raise ValueError("alpha and beta must have length steps + 1")
        object.__setattr__(self, "alpha", _frozen(alpha))
        object.__setattr__(self, "beta", _frozen(beta))

    @property
    def name(self) -> str:
        return f"{self.family.value}_{self.steps}"


def scheme_coefficients(family: "str | SchemeFamily", steps: int) -> MultistepScheme:
    """The standard scheme of the given family and step count.

    Raises
    ------
    UnsupportedStepsError
        ``steps`` outside 1..5.
    """
    family = SchemeFamily.parse(family)
    steps = int(steps)
    if not 1 <= steps <= MAX_STEPS:
        raise UnsupportedStepsError(f"steps must be in 1..{MAX_STEPS}, got {steps}")

    if family is SchemeFamily.ADAMS_BASHFORTH:
        alpha = [-1.0, 1.0] + [0.0] * (steps - 1)
        beta = [0.0] + _AB_BETA[steps]
        order = steps
    elif family is SchemeFamily.ADAMS_MOULTON:
        alpha = [-1.0, 1.0] + [0.0] * (steps - 1)
        beta = _AM_BETA[steps]
        order = steps + 1
    else:
        hist, beta0 = _BDF_ALPHA_BETA0[steps]
        alpha = [-1.0] + hist
        beta = [beta0] + [0.0] * steps
        order = steps
    return MultistepScheme(family=family, steps=steps, alpha=np.array(alpha), beta=np.array(beta), order=order)


def all_schemes(max_steps: int = MAX_STEPS) -> "list[MultistepScheme]":
    """Every shipped scheme: all three families at steps 1..max_steps."""
    return [scheme_coefficients(fam, m) for fam in SchemeFamily for m in range(1, max_steps + 1)]


def combine_residuals(
    scheme: MultistepScheme, states: np.ndarray, fvals: np.ndarray, dt: float
) -> np.ndarray:
    """Residual rows from precomputed field values.

    Row ``n - M`` of the result is
    ``sum_m alpha_m x_{n-m} + dt * beta_m * fvals_{n-m}`` for
    ``n = M .. N-1``, so the first row is the earliest sample with a full
    history window.  Shared by :func:`residuals` and the training-loss
    gradient path so the window indexing has a single source of truth.
    """
    n = states.shape[0]
    m_steps = scheme.steps
    out = np.zeros((n - m_steps, states.shape[1]), dtype=np.float64)
    for m in range(m_steps + 1):
        window = slice(m_steps - m, n - m)
        a = scheme.alpha[m]
        b = scheme.beta[m]
        if a != 0.0:
            out += a * states[window]
        if b != 0.0:
            out += (dt * b) * fvals[window]
    return out


def residuals(scheme: MultistepScheme, f: VectorField, ts: TimeSeries) -> np.ndarray:
    """Multistep residual matrix of a vector field against a trajectory.

    The field is evaluated at the observed states only: implicit schemes
    need no nonlinear solve because every sample in the window is data.
    Returns an ``(N - M) x D`` array.

    Raises
    ------
    DimensionMismatchError
        ``f.dim`` differs from the trajectory dimension.
    InsufficientSamplesError
        Fewer than ``M + 1`` samples.
    """
    if f.dim != ts.dim:
        raise DimensionMismatchError(f"field dim {f.dim} != trajectory dim {ts.dim}")
    if ts.n_samples <= scheme.steps:
        raise InsufficientSamplesError(
            f"need more than {scheme.steps} samples for a {scheme.steps}-step scheme, "
            f"got {ts.n_samples}"
        )
    fvals = f.at_states(ts.states)
    return combine_residuals(scheme, ts.states, fvals, ts.dt)


def mse_loss(res: np.ndarray) -> float:
    """Mean squared residual: sum of squared row norms over (rows + 1).

    The divisor is one more than the number of residual rows, matching the
    window-count convention of the training loss (a trajectory with N
    samples and an M-step scheme yields N - M rows and divisor N - M + 1).

    Raises
    ------
    EmptyInputError
        Empty residual matrix.
    """
    res = np.asarray(res, dtype=np.float64)
    if res.ndim != 2 or res.shape[0] == 0 or res.shape[1] == 0:
        raise EmptyInputError(f"residual matrix must be non-empty and 2-D, got shape {res.shape}")
    return float(np.sum(res * res) / (res.shape[0] + 1))
