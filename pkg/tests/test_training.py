import numpy as np
import pytest

import odelearn as od
import odelearn.training
from conftest import random_timeseries


def config(**kw):
    base = dict(
        scheme=od.scheme_coefficients("am", 1),
        layer_dims=(2, 8, 2),
        max_iters=50,
        log_every=10,
        seed=0,
    )
    base.update(kw)
    return od.TrainConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        config(max_iters=0)
    with pytest.raises(ValueError):
        config(learning_rate=0.0)
    with pytest.raises(ValueError):
        config(adam_beta1=1.0)
    with pytest.raises(ValueError):
        config(adam_beta2=-0.1)
    with pytest.raises(ValueError):
        config(adam_eps=0.0)
    with pytest.raises(ValueError):
        config(log_every=0)
    assert config(layer_dims=[2, 8, 2]).layer_dims == (2, 8, 2)


def test_report_validation():
    with pytest.raises(ValueError):
        od.TrainReport(final_loss=1.0, loss_history=(), wall_time=0.0, iterations_run=1)
    with pytest.raises(ValueError):
        od.TrainReport(
            final_loss=1.0, loss_history=((1, 2.0),), wall_time=0.0, iterations_run=1
        )
    with pytest.raises(ValueError):
        od.TrainReport(
            final_loss=-1.0, loss_history=((1, -1.0),), wall_time=0.0, iterations_run=1
        )


def test_history_bookkeeping(rng):
    ts = random_timeseries(rng, n=20)
    _, rep = od.train(config(max_iters=1), ts)
    assert [i for i, _ in rep.loss_history] == [1]
    assert rep.iterations_run == 1
    _, rep = od.train(config(max_iters=10, log_every=3), ts)
    assert [i for i, _ in rep.loss_history] == [3, 6, 9, 10]
    assert rep.final_loss == rep.loss_history[-1][1]
    assert rep.wall_time >= 0.0


def test_training_is_bit_deterministic(rng):
    ts = random_timeseries(rng, n=25)
    m1, r1 = od.train(config(), ts)
    m2, r2 = od.train(config(), ts)
    assert np.array_equal(od.flatten_params(m1), od.flatten_params(m2))
    assert r1.loss_history == r2.loss_history
    m3, _ = od.train(config(seed=1), ts)
    assert not np.array_equal(od.flatten_params(m1), od.flatten_params(m3))


def test_loss_decreases_on_real_data(short_osc):
    cfg = config(layer_dims=(2, 16, 2), max_iters=2000, log_every=500)
    fresh = od.mlp_init(list(cfg.layer_dims), cfg.seed)
    initial, _ = od.loss_and_gradient(fresh, cfg.scheme, short_osc)
    _, rep = od.train(cfg, short_osc)
    assert rep.final_loss < initial / 5
    losses = [l for _, l in rep.loss_history]
    assert losses == sorted(losses, reverse=True), "loss falls monotonically here"


def test_constant_trajectory_learns_zero_field():
    c = np.array([0.8, -0.3])
    ts = od.TimeSeries(0.0, 0.1, np.tile(c, (20, 1)))
    cfg = config(max_iters=3000, log_every=500)
    model, rep = od.train(cfg, ts)
    assert np.abs(model(c)).max() < 1e-3
    assert rep.final_loss < 1e-8


def test_train_is_single_trajectory_train_multi(rng):
    ts = random_timeseries(rng, n=20)
    m1, r1 = od.train(config(), ts)
    m2, r2 = od.train_multi(config(), [ts])
    assert np.array_equal(od.flatten_params(m1), od.flatten_params(m2))
    assert r1.loss_history == r2.loss_history


def test_manual_adam_replay_matches_train_multi(rng):
    """Five optimizer steps replayed by hand, bit for bit.

    The reference implementation lives entirely in this test: summed
    loss_and_gradient over the trajectories, textbook Adam with bias
    correction, same update order.
    """
    data = [random_timeseries(rng, n=15, dim=2), random_timeseries(rng, n=9, dim=2)]
    cfg = config(max_iters=5, log_every=100)
    model, rep = od.train_multi(cfg, data)

    ref = od.mlp_init(list(cfg.layer_dims), cfg.seed)
    theta = od.flatten_params(ref)
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    for t in range(1, 6):
        grad = np.zeros_like(theta)
        loss = 0.0
        cur = od.unflatten_params(ref, theta)
        for ts in data:
            l, g = od.loss_and_gradient(cur, cfg.scheme, ts)
            loss += l
            grad += g
        m = cfg.adam_beta1 * m + (1 - cfg.adam_beta1) * grad
        v = cfg.adam_beta2 * v + (1 - cfg.adam_beta2) * grad**2
        m_hat = m / (1 - cfg.adam_beta1**t)
        v_hat = v / (1 - cfg.adam_beta2**t)
        theta = theta - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)

    assert np.array_equal(od.flatten_params(model), theta)
    final = sum(
        od.loss_and_gradient(od.unflatten_params(ref, theta), cfg.scheme, ts)[0]
        for ts in data
    )
    assert rep.final_loss == final


def test_duplicated_trajectory_barely_changes_the_run(rng):
    """Adam normalizes gradient scale, so two copies act like one."""
    ts = random_timeseries(rng, n=20)
    cfg = config(max_iters=300, log_every=100)
    single, _ = od.train_multi(cfg, [ts])
    double, _ = od.train_multi(cfg, [ts, ts])
    diff = np.abs(od.flatten_params(single) - od.flatten_params(double)).max()
    assert diff < 1e-3


def test_mixed_datasets_rejected(rng):
    cfg = config()
    with pytest.raises(od.EmptyInputError):
        od.train_multi(cfg, [])
    with pytest.raises(od.MixedDimsError):
        od.train_multi(cfg, [random_timeseries(rng, dim=2), random_timeseries(rng, dim=3)])
    with pytest.raises(od.MixedDimsError):
        od.train_multi(
            cfg, [random_timeseries(rng, dt=0.05), random_timeseries(rng, dt=0.1)]
        )
    with pytest.raises(od.MixedDimsError):
        od.train_multi(config(layer_dims=(3, 8, 3)), [random_timeseries(rng, dim=2)])


def test_too_short_trajectory_rejected(rng):
    cfg = config(scheme=od.scheme_coefficients("bdf", 4))
    with pytest.raises(od.InsufficientSamplesError):
        od.train(cfg, random_timeseries(rng, n=4))


def test_diverged_loss_guard(rng, monkeypatch):
    ts = random_timeseries(rng, n=20)

    def bad_loss(model, scheme, data):
        return float("nan"), np.zeros(model.n_params)

    monkeypatch.setattr(odelearn.training, "loss_and_gradient", bad_loss)
    with pytest.raises(od.DivergedLoss):
        od.train(config(), ts)


def test_overparameterization_warning(rng):
    ts = random_timeseries(rng, n=5)
    with pytest.warns(UserWarning, match="overparameterized"):
        od.train(config(layer_dims=(2, 64, 2), max_iters=1), ts)


def test_log_file_matches_history(tmp_path, rng):
    ts = random_timeseries(rng, n=20)
    p = tmp_path / "log.csv"
    _, rep = od.train(config(max_iters=25, log_every=10), ts, log_path=str(p))
    rows = [line.split(",") for line in p.read_text().splitlines()]
    assert len(rows) == len(rep.loss_history) == 3
    elapsed = [float(r[2]) for r in rows]
    for row, (it, loss) in zip(rows, rep.loss_history):
        assert int(row[0]) == it
        assert float(row[1]) == loss, "logged loss is written with full precision"
    assert elapsed == sorted(elapsed)


def test_standardize_inputs_stored_on_model(rng):
    a = random_timeseries(rng, n=20, scale=5.0)
    b = od.TimeSeries(0.0, a.dt, a.states + 10.0)
    cfg = config(standardize_inputs=True, max_iters=5)
    model, _ = od.train_multi(cfg, [a, b])
    stacked = np.concatenate([a.states, b.states])
    assert np.allclose(model.input_shift, stacked.mean(axis=0), atol=0, rtol=0)
    assert np.allclose(model.input_scale, stacked.std(axis=0), atol=0, rtol=0)
    plain, _ = od.train_multi(config(max_iters=5), [a, b])
    assert plain.input_shift is None
