"""Fit the network by minimizing the mean squared multistep residual.

Training is plain full-batch Adam over the flat parameter vector: the
datasets here are at most a few thousand rows, so every iteration uses
the whole trajectory (or sum of trajectories) as one batch.  Runs are
bit-deterministic for a given config, data, and seed.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from .core import OdelearnError, TimeSeries, validate_timeseries
from .model import MlpModel, flatten_params, loss_and_gradient, mlp_init, unflatten_params
from .schemes import EmptyInputError, InsufficientSamplesError, MultistepScheme


class DivergedLoss(OdelearnError):
    """Training loss became NaN or infinite."""


class MixedDimsError(OdelearnError):
    """Trajectories in one training set disagree on dimension or step size."""


@dataclass(frozen=True)
class TrainConfig:
    """Everything that determines a training run besides the data.

    ``layer_dims`` must start and end with the state dimension.  With
    ``standardize_inputs`` the model stores the per-component mean and
    standard deviation of the training states and applies them before
    the first layer; the learned field stays self-contained.
    """

    scheme: MultistepScheme
    layer_dims: "tuple[int, ...]"
    max_iters: int = 50_000
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    log_every: int = 1000
    standardize_inputs: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "layer_dims", tuple(int(d) for d in self.layer_dims))
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not (0 <= self.adam_beta1 < 1 and 0 <= self.adam_beta2 < 1):
            raise ValueError("adam betas must lie in [0, 1)")
        if not self.adam_eps > 0:
            raise ValueError("adam_eps must be positive")
        if self.log_every < 1:
            raise ValueError("log_every must be >= 1")


@dataclass(frozen=True)
class TrainReport:
    """Outcome of one training run.

    ``loss_history`` holds (iteration, loss) pairs at every ``log_every``
    mark plus the final iteration, evaluated after the parameter update
    of that iteration; ``final_loss`` is the last of them.
    """

    final_loss: float
    loss_history: "tuple[tuple[int, float], ...]"
    wall_time: float
    iterations_run: int

    def __post_init__(self) -> None:
        hist = tuple((int(i), float(l)) for i, l in self.loss_history)
        if not hist:
            raise ValueError("loss_history must be nonempty")
        if hist[-1][1] != self.final_loss:
            raise ValueError("final_loss must equal the last recorded loss")
        if any(l < 0 for _, l in hist):
            raise ValueError("loss values must be nonnegative")
        object.__setattr__(self, "loss_history", hist)


def _check_datasets(
    scheme: MultistepScheme, layer_dims: "tuple[int, ...]", datasets: "list[TimeSeries]"
) -> None:
    if not datasets:
        raise EmptyInputError("need at least one trajectory to train on")
    dim = datasets[0].dim
    dt = datasets[0].dt
    for ts in datasets:
        validate_timeseries(ts)
        if ts.dim != dim:
            raise MixedDimsError(f"trajectory dims differ: {ts.dim} vs {dim}")
        if ts.dt != dt:
            raise MixedDimsError(f"trajectory step sizes differ: {ts.dt} vs {dt}")
        if ts.n_samples <= scheme.steps:
            raise InsufficientSamplesError(
                f"trajectory with {ts.n_samples} samples too short for a "
                f"{scheme.steps}-step scheme"
            )
    if layer_dims[0] != dim or layer_dims[-1] != dim:
        raise MixedDimsError(
            f"layer_dims must start and end with the state dimension {dim}, got {layer_dims}"
        )


def _standardization(datasets: "list[TimeSeries]") -> "tuple[np.ndarray, np.ndarray]":
    stacked = np.concatenate([ts.states for ts in datasets], axis=0)
    shift = stacked.mean(axis=0)
    scale = stacked.std(axis=0)
    scale[scale == 0.0] = 1.0
    return shift, scale


def train_multi(
    config: TrainConfig, datasets: "list[TimeSeries]", log_path: "str | None" = None
) -> "tuple[MlpModel, TrainReport]":
    """Train one model on the summed loss over several trajectories.

    Each trajectory contributes its own residual windows, so windows
    never span a trajectory boundary.  Gradients are accumulated in list
    order to keep runs bit-reproducible.  If ``log_path`` is given, rows
    of ``iteration,loss,elapsed_sec`` are written there as training runs.
    """
    _check_datasets(config.scheme, config.layer_dims, datasets)

    model = mlp_init(list(config.layer_dims), config.seed)
    if config.standardize_inputs:
        shift, scale = _standardization(datasets)
        model = MlpModel(
            layer_dims=model.layer_dims,
            weights=model.weights,
            biases=model.biases,
            input_shift=shift,
            input_scale=scale,
        )

    n_entries = sum((ts.n_samples - config.scheme.steps) * ts.dim for ts in datasets)
    if model.n_params > 10 * n_entries:
        warnings.warn(
            f"{model.n_params} parameters against {n_entries} residual entries; "
            "the fit is heavily overparameterized",
            stacklevel=2,
        )

    theta = flatten_params(model)
    adam_m = np.zeros_like(theta)
    adam_v = np.zeros_like(theta)

    def total_loss_grad(params: np.ndarray) -> "tuple[float, np.ndarray]":
        cur = unflatten_params(model, params)
        loss = 0.0
        grad = np.zeros_like(params)
        for ts in datasets:
            l, g = loss_and_gradient(cur, config.scheme, ts)
            loss += l
            grad += g
        return loss, grad

    def total_loss(params: np.ndarray) -> float:
        cur = unflatten_params(model, params)
        loss = 0.0
        for ts in datasets:
            l, _ = loss_and_gradient(cur, config.scheme, ts)
            loss += l
        return loss

    log_file = open(log_path, "w") if log_path else None
    history: "list[tuple[int, float]]" = []
    start = time.perf_counter()
    try:
        for t in range(1, config.max_iters + 1):
            loss, grad = total_loss_grad(theta)
            if not np.isfinite(loss):
                raise DivergedLoss(f"loss became non-finite at iteration {t}")
            adam_m = config.adam_beta1 * adam_m + (1 - config.adam_beta1) * grad
            adam_v = config.adam_beta2 * adam_v + (1 - config.adam_beta2) * (grad * grad)
            m_hat = adam_m / (1 - config.adam_beta1**t)
            v_hat = adam_v / (1 - config.adam_beta2**t)
            theta = theta - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)

            if t % config.log_every == 0 or t == config.max_iters:
                logged = total_loss(theta)
                if not np.isfinite(logged):
                    raise DivergedLoss(f"loss became non-finite at iteration {t}")
                history.append((t, logged))
                if log_file:
                    elapsed = time.perf_counter() - start
                    log_file.write(f"{t},{logged!r},{elapsed:.3f}\n")
                    log_file.flush()
    finally:
        if log_file:
            log_file.close()

    wall = time.perf_counter() - start
    trained = unflatten_params(model, theta)
    report = TrainReport(
        final_loss=history[-1][1],
        loss_history=tuple(history),
        wall_time=wall,
        iterations_run=config.max_iters,
    )
    return trained, report


def train(
    config: TrainConfig, ts: TimeSeries, log_path: "str | None" = None
) -> "tuple[MlpModel, TrainReport]":
    """Train one model on a single trajectory."""
    return train_multi(config, [ts], log_path=log_path)
