"""Dense tanh network used as the learned right-hand side.

The network maps a state vector to a derivative vector: hidden layers use
tanh (the learned field must be smooth enough to feed a high-order
integrator), the output layer is linear (derivatives are unbounded).
Parameters flatten to a single vector in a fixed order: every weight
matrix in layer order, each in row-major order, followed by every bias
vector in layer order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DimensionMismatchError,
    NonFiniteError,
    OdelearnError,
    TimeSeries,
    VectorField,
    _frozen,
)
from .schemes import InsufficientSamplesError, MultistepScheme, combine_residuals


class BadDimsError(OdelearnError):
    """Malformed layer size list."""


@dataclass(frozen=True, eq=False)
class MlpModel:
    """A multilayer perceptron with tanh hidden units and linear output.

    ``weights[l]`` has shape ``(layer_dims[l+1], layer_dims[l])`` and acts
    on column vectors; ``biases[l]`` has shape ``(layer_dims[l+1],)``.
    ``input_shift``/``input_scale``, when set, standardize the input
    per component (``z = (x - shift) / scale``) before the first layer,
    so a model trained on standardized states stays self-contained.
    """

    layer_dims: "tuple[int, ...]"
    weights: "tuple[np.ndarray, ...]"
    biases: "tuple[np.ndarray, ...]"
    activation: str = "tanh"
    input_shift: "np.ndarray | None" = None
    input_scale: "np.ndarray | None" = None

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.layer_dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise BadDimsError(f"layer_dims needs >= 2 entries, all >= 1, got {dims}")
        if self.activation != "tanh":
            raise ValueError(f"unsupported activation: {self.activation!r}")
        n_layers = len(dims) - 1
        if len(self.weights) != n_layers or len(self.biases) != n_layers:
            raise BadDimsError(f"expected {n_layers} weight/bias pairs")
        ws = []
        bs = []
        for l in range(n_layers):
            w = np.array(self.weights[l], dtype=np.float64)
            b = np.array(self.biases[l], dtype=np.float64)
            if w.shape != (dims[l + 1], dims[l]):
                raise BadDimsError(f"weight {l} shape {w.shape} != {(dims[l + 1], dims[l])}")
            if b.shape != (dims[l + 1],):
                raise BadDimsError(f"bias {l} shape {b.shape} != {(dims[l + 1],)}")
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise NonFiniteError(f"non-finite parameters in layer {l}")
            ws.append(_frozen(w))
            bs.append(_frozen(b))
        shift = self.input_shift
        scale = self.input_scale
        if (shift is None) != (scale is None):
            raise ValueError("input_shift and input_scale must be set together")
        if shift is not None:
            shift = np.array(shift, dtype=np.float64)
            scale = np.array(scale, dtype=np.float64)
            if shift.shape != (dims[0],) or scale.shape != (dims[0],):
                raise BadDimsError("standardization vectors must match the input dimension")
            if not (np.isfinite(shift).all() and np.isfinite(scale).all()):
                raise NonFiniteError("non-finite standardization vectors")
            if np.any(scale == 0.0):
                raise ValueError("input_scale entries must be nonzero")
            shift = _frozen(shift)
            scale = _frozen(scale)
        object.__setattr__(self, "layer_dims", dims)
        object.__setattr__(self, "weights", tuple(ws))
        object.__setattr__(self, "biases", tuple(bs))
        object.__setattr__(self, "input_shift", shift)
        object.__setattr__(self, "input_scale", scale)

    @property
    def in_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def out_dim(self) -> int:
        return self.layer_dims[-1]

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def _forward_batch(self, x: np.ndarray) -> "tuple[list[np.ndarray], np.ndarray]":
        """All layer activations plus the output for a batch of states.

        ``acts[0]`` is the (standardized) input; ``acts[l]`` for l >= 1 is
        the tanh output of hidden layer l.  Kept separate from
        :meth:`forward_batch` so the gradient path can reuse the
        intermediate activations.
        """
        if self.input_shift is not None:
            x = (x - self.input_shift) / self.input_scale
        acts = [x]
        n_layers = len(self.weights)
        for l in range(n_layers - 1):
            x = np.tanh(x @ self.weights[l].T + self.biases[l])
            acts.append(x)
        out = x @ self.weights[-1].T + self.biases[-1]
        return acts, out

    def forward_batch(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the network on an ``(N, in_dim)`` batch of states."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise DimensionMismatchError(f"expected (N, {self.in_dim}) batch, got {x.shape}")
        return self._forward_batch(x)[1]

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the network on a single state vector."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.in_dim,):
            raise DimensionMismatchError(f"expected input of shape ({self.in_dim},), got {x.shape}")
        return self._forward_batch(x[None, :])[1][0]

    __call__ = forward

    def as_vector_field(self) -> VectorField:
        """View a square model as a vector field usable by the integrators."""
        if self.in_dim != self.out_dim:
            raise DimensionMismatchError(
                f"only square models define a vector field, got {self.in_dim} -> {self.out_dim}"
            )
        return VectorField(dim=self.in_dim, fn=self.forward)


def mlp_init(layer_dims: "list[int]", seed: int) -> MlpModel:
    """Fresh model with Xavier-uniform weights and zero biases.

    Weight entries for a layer with fan_in inputs and fan_out outputs are
    uniform on [-b, b] with b = sqrt(6 / (fan_in + fan_out)).  Deterministic
    given the seed.
    """
    dims = [int(d) for d in layer_dims]
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise BadDimsError(f"layer_dims needs >= 2 entries, all >= 1, got {dims}")
    rng = np.random.default_rng(seed)
    weights = []
    biases = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(layer_dims=tuple(dims), weights=tuple(weights), biases=tuple(biases))


def flatten_params(model: MlpModel) -> np.ndarray:
    """All parameters as one vector: weights (layer order, row-major), then biases."""
    parts = [w.ravel() for w in model.weights] + [b for b in model.biases]
    return np.concatenate(parts)


def unflatten_params(model: MlpModel, flat: np.ndarray) -> MlpModel:
    """A model with ``model``'s architecture and the given flat parameters."""
    flat = np.asarray(flat, dtype=np.float64)
    if flat.shape != (model.n_params,):
        raise DimensionMismatchError(f"expected {model.n_params} parameters, got shape {flat.shape}")
    weights = []
    biases = []
    pos = 0
    for w in model.weights:
        weights.append(flat[pos : pos + w.size].reshape(w.shape))
        pos += w.size
    for b in model.biases:
        biases.append(flat[pos : pos + b.size])
        pos += b.size
    return MlpModel(
        layer_dims=model.layer_dims,
        weights=tuple(weights),
        biases=tuple(biases),
        activation=model.activation,
        input_shift=model.input_shift,
        input_scale=model.input_scale,
    )


def loss_and_gradient(
    model: MlpModel, scheme: MultistepScheme, ts: TimeSeries
) -> "tuple[float, np.ndarray]":
    """Mean squared multistep residual and its parameter gradient.

    The loss is ``sum |y_n|^2 / (N - M + 1)`` over the N - M residual rows
    y_n = sum_m alpha_m x_{n-m} + dt * beta_m * f_hat(x_{n-m}).  The
    gradient is exact reverse-mode: each network output receives the
    beta-weighted sum of the residual rows its sample appears in, and
    that cotangent is backpropagated through the layers.  Returned in
    :func:`flatten_params` order.
    """
    if model.in_dim != ts.dim or model.out_dim != ts.dim:
        raise DimensionMismatchError(
            f"model maps {model.in_dim} -> {model.out_dim}, trajectory dim is {ts.dim}"
        )
    n = ts.n_samples
    m_steps = scheme.steps
    if n <= m_steps:
        raise InsufficientSamplesError(
            f"need more than {m_steps} samples for a {m_steps}-step scheme, got {n}"
        )

    acts, fvals = model._forward_batch(ts.states)
    res = combine_residuals(scheme, ts.states, fvals, ts.dt)
    rows = res.shape[0]
    loss = float(np.sum(res * res) / (rows + 1))

    # Cotangent on the network outputs: sample n enters row n - m with
    # weight dt * beta_m, and d(loss)/d(res) = 2 res / (rows + 1).
    cot = np.zeros_like(fvals)
    coeff = 2.0 * ts.dt / (rows + 1)
    for m in range(m_steps + 1):
        b = scheme.beta[m]
        if b != 0.0:
            cot[m_steps - m : n - m] += (coeff * b) * res

    n_layers = len(model.weights)
    grad_w: "list[np.ndarray]" = [np.empty(0)] * n_layers
    grad_b: "list[np.ndarray]" = [np.empty(0)] * n_layers
    delta = cot
    for l in range(n_layers - 1, -1, -1):
        grad_w[l] = delta.T @ acts[l]
        grad_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ model.weights[l]) * (1.0 - acts[l] ** 2)

    flat = np.concatenate([g.ravel() for g in grad_w] + grad_b)
    return loss, flat
