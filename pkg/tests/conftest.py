import sys

import numpy as np
import pytest

import odelearn as od


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one line per acceptance criterion after the run."""
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", []) if mod else []
    if lines:
        terminalreporter.section("acceptance summary")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def osc_data() -> od.TimeSeries:
    """The standard cubic-oscillator dataset, shared read-only."""
    return od.standard_dataset("oscillator")


@pytest.fixture(scope="session")
def short_osc(osc_data) -> od.TimeSeries:
    """First 201 samples of the oscillator data: enough to train on fast."""
    return osc_data.window(201)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_timeseries(rng, n=40, dim=2, dt=0.05, t0=0.0, scale=1.0) -> od.TimeSeries:
    return od.TimeSeries(t0=t0, dt=dt, states=scale * rng.standard_normal((n, dim)))


def fd_gradient(model, scheme, ts, coords, h=1e-6) -> np.ndarray:
    """Central-difference loss gradient on selected coordinates."""
    theta = od.flatten_params(model)
    out = np.empty(len(coords))
    for k, i in enumerate(coords):
        tp = theta.copy()
        tp[i] += h
        tm = theta.copy()
        tm[i] -= h
        lp, _ = od.loss_and_gradient(od.unflatten_params(model, tp), scheme, ts)
        lm, _ = od.loss_and_gradient(od.unflatten_params(model, tm), scheme, ts)
        out[k] = (lp - lm) / (2 * h)
    return out


def gradient_agrees(model, scheme, ts, n_coords=50, seed=0, h=1e-6, rtol=1e-6) -> bool:
    """Backprop vs central differences on randomly chosen coordinates.

    Coordinates where both estimates are below 1e-10 count as agreeing
    (the finite-difference signal is pure rounding noise there).
    """
    _, grad = od.loss_and_gradient(model, scheme, ts)
    rng = np.random.default_rng(seed)
    n = min(n_coords, grad.size)
    coords = rng.choice(grad.size, size=n, replace=False)
    fd = fd_gradient(model, scheme, ts, coords, h=h)
    for k, i in enumerate(coords):
        a, b = grad[i], fd[k]
        big = max(abs(a), abs(b))
        if big < 1e-10:
            continue
        if abs(a - b) / big >= rtol:
            return False
    return True
