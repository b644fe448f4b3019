import numpy as np
import pytest

import odelearn as od


def test_timeseries_coerces_to_float64_c_order():
    ts = od.TimeSeries(t0=0, dt=1, states=[[1, 2], [3, 4]])
    assert ts.states.dtype == np.float64
    assert ts.states.flags["C_CONTIGUOUS"]
    assert isinstance(ts.t0, float) and isinstance(ts.dt, float)
    assert ts.n_samples == 2 and ts.dim == 2


def test_timeseries_states_read_only():
    ts = od.TimeSeries(t0=0.0, dt=0.1, states=np.zeros((3, 2)))
    with pytest.raises(ValueError):
        ts.states[0, 0] = 1.0


def test_timeseries_rejects_non_2d():
    with pytest.raises(ValueError):
        od.TimeSeries(t0=0.0, dt=0.1, states=np.zeros(5))
    with pytest.raises(ValueError):
        od.TimeSeries(t0=0.0, dt=0.1, states=np.zeros((2, 2, 2)))


def test_times_exact_progression():
    ts = od.TimeSeries(t0=1.0, dt=0.5, states=np.zeros((4, 1)))
    assert np.array_equal(ts.times(), [1.0, 1.5, 2.0, 2.5])


def test_subsample_keeps_every_kth_row():
    states = np.arange(10.0).reshape(5, 2)
    ts = od.TimeSeries(t0=2.0, dt=0.1, states=states)
    sub = ts.subsample(2)
    assert sub.t0 == 2.0
    assert sub.dt == pytest.approx(0.2)
    assert np.array_equal(sub.states, states[::2])


def test_subsample_identity_returns_self():
    ts = od.TimeSeries(t0=0.0, dt=0.1, states=np.zeros((4, 1)))
    assert ts.subsample(1) is ts


def test_subsample_rejects_bad_factor():
    ts = od.TimeSeries(t0=0.0, dt=0.1, states=np.zeros((4, 1)))
    with pytest.raises(ValueError):
        ts.subsample(0)


def test_window_takes_first_rows():
    states = np.arange(8.0).reshape(4, 2)
    ts = od.TimeSeries(t0=0.0, dt=0.1, states=states)
    w = ts.window(3)
    assert w.n_samples == 3
    assert np.array_equal(w.states, states[:3])
    assert w.dt == ts.dt and w.t0 == ts.t0


def test_window_bounds():
    ts = od.TimeSeries(t0=0.0, dt=0.1, states=np.zeros((4, 1)))
    with pytest.raises(ValueError):
        ts.window(1)
    with pytest.raises(ValueError):
        ts.window(5)


def test_equality_is_exact():
    a = od.TimeSeries(t0=0.0, dt=0.1, states=[[1.0], [2.0]])
    b = od.TimeSeries(t0=0.0, dt=0.1, states=[[1.0], [2.0]])
    assert a == b
    assert a != od.TimeSeries(t0=0.0, dt=0.1, states=[[1.0], [2.0 + 1e-15]])
    assert a != od.TimeSeries(t0=1e-300, dt=0.1, states=[[1.0], [2.0]])
    assert a != od.TimeSeries(t0=0.0, dt=0.1, states=[[1.0], [2.0], [3.0]])
    assert a != "not a timeseries"


def test_validate_timeseries_passes_and_returns_input():
    ts = od.TimeSeries(t0=0.0, dt=0.1, states=np.ones((3, 2)))
    assert od.validate_timeseries(ts) is ts


def test_validate_timeseries_errors():
    with pytest.raises(od.TooShortError):
        od.validate_timeseries(od.TimeSeries(0.0, 0.1, np.ones((1, 2))))
    with pytest.raises(od.BadStepError):
        od.validate_timeseries(od.TimeSeries(0.0, 0.0, np.ones((3, 2))))
    with pytest.raises(od.BadStepError):
        od.validate_timeseries(od.TimeSeries(0.0, -0.1, np.ones((3, 2))))
    with pytest.raises(od.BadStepError):
        od.validate_timeseries(od.TimeSeries(0.0, np.nan, np.ones((3, 2))))
    with pytest.raises(od.NonFiniteError):
        od.validate_timeseries(od.TimeSeries(np.inf, 0.1, np.ones((3, 2))))
    bad = np.ones((3, 2))
    bad[1, 1] = np.nan
    with pytest.raises(od.NonFiniteError):
        od.validate_timeseries(od.TimeSeries(0.0, 0.1, bad))


def test_vector_field_validates_shapes():
    f = od.VectorField(dim=2, fn=lambda x: x * 2.0)
    assert np.array_equal(f(np.array([1.0, -1.0])), [2.0, -2.0])
    with pytest.raises(od.DimensionMismatchError):
        f(np.array([1.0, 2.0, 3.0]))
    bad = od.VectorField(dim=2, fn=lambda x: np.zeros(3))
    with pytest.raises(od.DimensionMismatchError):
        bad(np.array([1.0, 2.0]))


def test_vector_field_at_states_matches_rowwise(rng):
    f = od.VectorField(dim=3, fn=lambda x: np.array([x[1], -x[0], x[2] ** 2]))
    states = rng.standard_normal((6, 3))
    batch = f.at_states(states)
    for i in range(6):
        assert np.array_equal(batch[i], f(states[i]))
    with pytest.raises(od.DimensionMismatchError):
        f.at_states(states[:, :2])


def test_exceptions_share_base():
    for err in (
        od.NonFiniteError,
        od.TooShortError,
        od.BadStepError,
        od.DimensionMismatchError,
        od.UnsupportedStepsError,
        od.InsufficientSamplesError,
        od.EmptyInputError,
        od.BadDimsError,
        od.DivergedLoss,
        od.MixedDimsError,
        od.NonFiniteStateError,
        od.UnknownDatasetError,
        od.ParseError,
        od.NonUniformGridError,
        od.EmptyFileError,
        od.GridMismatchError,
        od.ZeroReferenceError,
    ):
        assert issubclass(err, od.OdelearnError)
