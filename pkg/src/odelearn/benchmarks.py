"""Benchmark vector fields and their standard data recipes.

Five systems: a cubic two-dimensional oscillator, the Lorenz system, the
Hopf normal form with its bifurcation parameter folded into the state, a
seven-species glycolytic oscillator, and a three-mode mean-field model of
the flow behind a cylinder (a stable limit cycle reached through a
shift-mode transient).  Ground-truth trajectories are integrated with
RK4 at 10 internal substeps per reported sample so data error sits far
below the multistep residual scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from importlib import resources

import numpy as np

from .core import OdelearnError, TimeSeries, VectorField
from .integrators import integrate_rk4


class UnknownDatasetError(OdelearnError):
    """No benchmark dataset under that name."""


def cubic_oscillator() -> VectorField:
    """Damped harmonic oscillator with cubic dynamics.

    xdot = -0.1 x^3 + 2.0 y^3, ydot = -2.0 x^3 - 0.1 y^3.
    """

    def f(s: np.ndarray) -> np.ndarray:
        x, y = s
        return np.array([-0.1 * x**3 + 2.0 * y**3, -2.0 * x**3 - 0.1 * y**3])

    return VectorField(dim=2, fn=f)


def lorenz() -> VectorField:
    """The Lorenz system at the classical chaotic parameters.

    xdot = 10(y - x), ydot = x(28 - z) - y, zdot = xy - (8/3) z.
    """

    def f(s: np.ndarray) -> np.ndarray:
        x, y, z = s
        return np.array([10.0 * (y - x), x * (28.0 - z) - y, x * y - (8.0 / 3.0) * z])

    return VectorField(dim=3, fn=f)


def hopf_augmented() -> VectorField:
    """Hopf normal form with the parameter mu carried as a state.

    State order (mu, x, y) with mu-dot = 0, so one network can learn the
    dynamics across parameter values from trajectories at several mu:

        xdot = mu x + y - x (x^2 + y^2)
        ydot = -x + mu y - y (x^2 + y^2)

    For mu > 0 the origin is unstable and a limit cycle of radius
    sqrt(mu) attracts; for mu < 0 the origin attracts.
    """

    def f(s: np.ndarray) -> np.ndarray:
        mu, x, y = s
        r2 = x * x + y * y
        return np.array([0.0, mu * x + y - x * r2, -x + mu * y - y * r2])

    return VectorField(dim=3, fn=f)


@dataclass(frozen=True)
class GlycolyticParams:
    """Rate constants of the seven-species glycolytic oscillator.

    Defaults ship in ``glycolytic_defaults.json`` next to this module and
    every value can be overridden there or per field.
    """

    J0: float
    k1: float
    k2: float
    k3: float
    k4: float
    k5: float
    k6: float
    k: float
    kappa: float
    K1: float
    q: float
    N: float
    A: float
    psi: float

    def __post_init__(self) -> None:
        for f in fields(self):
            v = float(getattr(self, f.name))
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"parameter {f.name} must be positive and finite, got {v}")
            object.__setattr__(self, f.name, v)
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")

    @classmethod
    def from_mapping(cls, d: dict) -> "GlycolyticParams":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown glycolytic parameters: {sorted(unknown)}")
        missing = names - set(d)
        if missing:
            raise ValueError(f"missing glycolytic parameters: {sorted(missing)}")
        return cls(**{k: float(v) for k, v in d.items()})


def load_glycolytic_config(path: "str | None" = None) -> "tuple[GlycolyticParams, np.ndarray]":
    """Parameters and the 7x2 initial-condition ranges, from JSON.

    Without a path the packaged defaults are used.  The file holds a
    ``params`` object keyed by constant name and an ``initial_ranges``
    object mapping S1..S7 to [low, high] pairs.
    """
    if path is None:
        text = resources.files(__package__).joinpath("glycolytic_defaults.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    cfg = json.loads(text)
    params = GlycolyticParams.from_mapping(cfg["params"])
    ranges = np.array([cfg["initial_ranges"][f"S{i}"] for i in range(1, 8)], dtype=np.float64)
    if ranges.shape != (7, 2) or np.any(ranges[:, 0] > ranges[:, 1]):
        raise ValueError("initial_ranges must map S1..S7 to [low, high] pairs")
    return params, ranges


def glycolytic(params: GlycolyticParams) -> VectorField:
    """Seven-species glycolytic oscillator.

    The S3 sink term uses (A - S6), matching the paired source terms in
    the S4 and S6 equations; the (N - S6) variant of that term makes the
    system diverge in finite time (t < 1) from every initial condition in
    the tabulated ranges, so it is not usable as a benchmark.
    """
    p = params

    def f(s: np.ndarray) -> np.ndarray:
        s1, s2, s3, s4, s5, s6, s7 = s
        flux = p.k1 * s1 * s6 / (1.0 + (s6 / p.K1) ** p.q)
        return np.array(
            [
                p.J0 - flux,
                2.0 * flux - p.k2 * s2 * (p.N - s5) - p.k6 * s2 * s5,
                p.k2 * s2 * (p.N - s5) - p.k3 * s3 * (p.A - s6),
                p.k3 * s3 * (p.A - s6) - p.k4 * s4 * s5 - p.kappa * (s4 - s7),
                p.k2 * s2 * (p.N - s5) - p.k4 * s4 * s5 - p.k6 * s2 * s5,
                -2.0 * flux + 2.0 * p.k3 * s3 * (p.A - s6) - p.k5 * s6,
                p.psi * p.kappa * (s4 - s7) - p.k * s7,
            ]
        )

    return VectorField(dim=7, fn=f)


def draw_glycolytic_ic(ranges: np.ndarray, seed: int) -> np.ndarray:
    """One initial condition drawn uniformly from the per-species ranges."""
    ranges = np.asarray(ranges, dtype=np.float64)
    rng = np.random.default_rng(seed)
    return rng.uniform(ranges[:, 0], ranges[:, 1])


def cylinder_surrogate(
    mu: float = 0.1, omega: float = 1.0, a: float = -0.1, lam: float = 10.0
) -> VectorField:
    """Three-mode mean-field surrogate of the cylinder wake.

    Two oscillation amplitudes (x, y) plus a shift mode z slaved to their
    energy:

        xdot = mu x - omega y + a x z
        ydot = omega x + mu y + a y z
        zdot = -lam (z - x^2 - y^2)

    With a < 0 the system leaves the unstable origin along a slow
    transient and settles on a limit cycle of radius sqrt(-mu/a).
    """

    def f(s: np.ndarray) -> np.ndarray:
        x, y, z = s
        return np.array(
            [
                mu * x - omega * y + a * x * z,
                omega * x + mu * y + a * y * z,
                -lam * (z - x * x - y * y),
            ]
        )

    return VectorField(dim=3, fn=f)


def cylinder_surrogate_dataset(
    dt: float = 0.02,
    t_end: float = 60.0,
    x0: "tuple[float, float, float]" = (0.2, 0.0, 0.0),
    substeps: int = 10,
) -> TimeSeries:
    """Surrogate wake trajectory: transient spiral onto the limit cycle.

    The default start sits at radius 0.2 with the shift mode at rest.
    Starting much closer to the unstable origin makes identification
    fragile: the field there is tiny and the spiral's turns leave wide
    radial gaps, so learned-model rollouts drift unpredictably.  The
    z = 0 start also probes the field off the z ~ x^2 + y^2 slow
    manifold during the brief initial relaxation, which pins down the
    shift mode's attraction for the learner.
    """
    steps = int(round(t_end / dt))
    return integrate_rk4(cylinder_surrogate(), np.array(x0), dt, steps, substeps=substeps)


def add_noise(ts: TimeSeries, level: float, seed: int) -> TimeSeries:
    """Corrupt a trajectory with proportional Gaussian noise.

    Each component receives zero-mean noise with standard deviation
    ``level`` times that component's standard deviation over the clean
    trajectory, so a "0.01% noise" level means 1e-4 of the signal scale
    regardless of component magnitudes.  Level 0 returns the input
    unchanged; the realization is deterministic per seed.
    """
    if level < 0:
        raise ValueError(f"noise level must be >= 0, got {level}")
    if level == 0:
        return ts
    rng = np.random.default_rng(seed)
    scale = level * ts.states.std(axis=0)
    noisy = ts.states + rng.standard_normal(ts.states.shape) * scale
    return TimeSeries(t0=ts.t0, dt=ts.dt, states=noisy)


# Training grid for the Hopf study: parameter values straddling the
# bifurcation, two starting radii per value (inside and outside the limit
# cycle where one exists).
HOPF_TRAIN_MU = (-0.2, -0.1, 0.1, 0.2, 0.3, 0.4, 0.5)
HOPF_TRAIN_RADII = (0.25, 1.0)

_HORIZONS = {"oscillator": 25.0, "lorenz": 25.0, "hopf": 25.0, "glycolytic": 10.0}

_ALIASES = {
    "oscillator": "oscillator",
    "cubic": "oscillator",
    "cubic_oscillator": "oscillator",
    "cubicoscillator": "oscillator",
    "lorenz": "lorenz",
    "hopf": "hopf",
    "glycolytic": "glycolytic",
}


def standard_dataset(
    name: str,
    dt: float = 0.01,
    t_end: "float | None" = None,
    seed: int = 0,
    params_path: "str | None" = None,
    substeps: int = 10,
) -> "TimeSeries | list[TimeSeries]":
    """The standard training data for one benchmark.

    - ``oscillator``: cubic oscillator from [2, 0] over [0, 25]
    - ``lorenz``: from [-8, 7, 27] over [0, 25]
    - ``hopf``: a list of trajectories over the (mu, radius) training
      grid, each with state (mu, x, y) over [0, 25]
    - ``glycolytic``: from an initial condition drawn (seed-controlled)
      from the configured species ranges, over [0, 10]

    All at step 0.01 unless overridden.
    """
    key = _ALIASES.get(name.strip().lower().replace("-", "_"))
    if key is None:
        raise UnknownDatasetError(f"unknown dataset: {name!r}")
    horizon = _HORIZONS[key] if t_end is None else float(t_end)
    steps = int(round(horizon / dt))

    if key == "oscillator":
        return integrate_rk4(cubic_oscillator(), np.array([2.0, 0.0]), dt, steps, substeps=substeps)
    if key == "lorenz":
        return integrate_rk4(lorenz(), np.array([-8.0, 7.0, 27.0]), dt, steps, substeps=substeps)
    if key == "hopf":
        field = hopf_augmented()
        out = []
        for mu in HOPF_TRAIN_MU:
            for r in HOPF_TRAIN_RADII:
                x0 = np.array([mu, r, 0.0])
                out.append(integrate_rk4(field, x0, dt, steps, substeps=substeps))
        return out
    params, ranges = load_glycolytic_config(params_path)
    x0 = draw_glycolytic_ic(ranges, seed)
    return integrate_rk4(glycolytic(params), x0, dt, steps, substeps=substeps)
