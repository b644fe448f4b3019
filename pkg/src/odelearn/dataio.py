"""File formats: trajectory CSV, model JSON, and error-grid CSV.

Three formats make up the whole surface.  Trajectory files are
delimiter-separated text with header ``t,x1,...,xD`` and an optional
integer ``traj`` column that bundles several trajectories in one file.
All numbers are written in shortest-round-trip decimal form, so
write-then-read reproduces every double bit-exactly; the time column is
emitted as an exact decimal arithmetic progression, which lets the
reader recover the step size exactly from the first two rows.
"""

from __future__ import annotations

import csv
import json
from decimal import Decimal, InvalidOperation

import numpy as np

from .core import DimensionMismatchError, OdelearnError, TimeSeries
from .model import MlpModel
from .schemes import EmptyInputError


class ParseError(OdelearnError):
    """Malformed row or header in an input file."""


class NonUniformGridError(OdelearnError):
    """Time column is not a uniform increasing grid."""


class EmptyFileError(OdelearnError):
    """File contains no data rows."""


_REL_TOL = Decimal("1e-9")


def _t_strings(ts: TimeSeries) -> "list[str]":
    t0 = Decimal(repr(ts.t0))
    dt = Decimal(repr(ts.dt))
    return [str(t0 + i * dt) for i in range(ts.n_samples)]


def write_timeseries_csv(data: "TimeSeries | list[TimeSeries]", path: str) -> None:
    """Write one trajectory, or a bundle of them, losslessly.

    A single trajectory gets header ``t,x1,...,xD``; a list gets an extra
    ``traj`` column numbering the trajectories in order.
    """
    bundle = [data] if isinstance(data, TimeSeries) else list(data)
    if not bundle:
        raise EmptyInputError("nothing to write")
    dim = bundle[0].dim
    for ts in bundle:
        if ts.dim != dim:
            raise DimensionMismatchError("all trajectories in one file must share a dimension")
    multi = not isinstance(data, TimeSeries)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["t"] + [f"x{i}" for i in range(1, dim + 1)]
        if multi:
            header.append("traj")
        writer.writerow(header)
        for k, ts in enumerate(bundle):
            tcol = _t_strings(ts)
            for i in range(ts.n_samples):
                row = [tcol[i]] + [repr(float(v)) for v in ts.states[i]]
                if multi:
                    row.append(str(k))
                writer.writerow(row)


def _parse_header(header: "list[str]") -> "tuple[int, bool]":
    cols = [c.strip() for c in header]
    has_traj = bool(cols) and cols[-1] == "traj"
    if has_traj:
        cols = cols[:-1]
    if len(cols) < 2 or cols[0] != "t":
        raise ParseError(f"header must be t,x1,...,xD[,traj], got {header}")
    dim = len(cols) - 1
    if cols[1:] != [f"x{i}" for i in range(1, dim + 1)]:
        raise ParseError(f"state columns must be named x1..x{dim}, got {header}")
    return dim, has_traj


def _series_from_rows(
    t_tokens: "list[str]", states: "list[list[float]]"
) -> TimeSeries:
    if len(t_tokens) < 2:
        raise ParseError("a trajectory needs at least 2 samples to define a step size")
    try:
        t_dec = [Decimal(tok) for tok in t_tokens]
    except InvalidOperation as e:
        raise ParseError(f"bad time value: {e}") from None
    dt_dec = t_dec[1] - t_dec[0]
    if dt_dec <= 0:
        raise NonUniformGridError(f"time column must increase, first step is {dt_dec}")
    tol = _REL_TOL * dt_dec
    for i in range(1, len(t_dec)):
        diff = t_dec[i] - t_dec[i - 1]
        if abs(diff - dt_dec) > tol:
            raise NonUniformGridError(
                f"non-uniform time grid at row {i}: step {diff} vs {dt_dec}"
            )
    return TimeSeries(
        t0=float(t_dec[0]), dt=float(dt_dec), states=np.array(states, dtype=np.float64)
    )


def read_timeseries_csv(path: str) -> "TimeSeries | list[TimeSeries]":
    """Read a trajectory file written by :func:`write_timeseries_csv`.

    Returns a single trajectory for plain files and a list when the file
    carries a ``traj`` column (even if it names only one trajectory).
    The time column must be a uniform grid to 1e-9 relative tolerance;
    malformed input is rejected, never repaired.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise EmptyFileError(f"{path} is empty")
    dim, has_traj = _parse_header(rows[0])
    ncols = 1 + dim + (1 if has_traj else 0)
    if len(rows) == 1:
        raise EmptyFileError(f"{path} has a header but no data rows")

    groups: "dict[int, tuple[list[str], list[list[float]]]]" = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != ncols:
            raise ParseError(f"row {lineno}: expected {ncols} columns, got {len(row)}")
        try:
            state = [float(v) for v in row[1 : 1 + dim]]
        except ValueError:
            raise ParseError(f"row {lineno}: non-numeric state value") from None
        if has_traj:
            try:
                key = int(row[-1])
            except ValueError:
                raise ParseError(f"row {lineno}: non-integer traj value {row[-1]!r}") from None
        else:
            key = 0
        t_toks, states = groups.setdefault(key, ([], []))
        t_toks.append(row[0])
        states.append(state)

    series = [_series_from_rows(t, s) for t, s in groups.values()]
    return series if has_traj else series[0]


MODEL_FORMAT = "odelearn-model"


def save_model(model: MlpModel, path: str) -> None:
    """Write a model as self-describing JSON, lossless for all parameters.

    Parameters are stored flat in the documented order (weights in layer
    order, row-major, then biases); JSON's shortest-round-trip float
    encoding preserves every bit.
    """
    from .model import flatten_params

    doc = {
        "format": MODEL_FORMAT,
        "version": 1,
        "layer_dims": list(model.layer_dims),
        "activation": model.activation,
        "input_shift": None if model.input_shift is None else model.input_shift.tolist(),
        "input_scale": None if model.input_scale is None else model.input_scale.tolist(),
        "params": flatten_params(model).tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, allow_nan=False)


def load_model(path: str) -> MlpModel:
    """Read a model file written by :func:`save_model`."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: {e}") from None
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ParseError(f"{path} is not a model file")
    try:
        dims = [int(d) for d in doc["layer_dims"]]
        flat = np.array(doc["params"], dtype=np.float64)
        shift = doc.get("input_shift")
        scale = doc.get("input_scale")
        activation = doc.get("activation", "tanh")
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"{path}: malformed model file ({e})") from None

    weights = []
    biases = []
    pos = 0
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        n = fan_out * fan_in
        if pos + n > flat.size:
            raise ParseError(f"{path}: too few parameters for layer_dims {dims}")
        weights.append(flat[pos : pos + n].reshape(fan_out, fan_in))
        pos += n
    for fan_out in dims[1:]:
        if pos + fan_out > flat.size:
            raise ParseError(f"{path}: too few parameters for layer_dims {dims}")
        biases.append(flat[pos : pos + fan_out])
        pos += fan_out
    if pos != flat.size:
        raise ParseError(f"{path}: {flat.size - pos} extra parameters")
    return MlpModel(
        layer_dims=tuple(dims),
        weights=tuple(weights),
        biases=tuple(biases),
        activation=activation,
        input_shift=None if shift is None else np.array(shift, dtype=np.float64),
        input_scale=None if scale is None else np.array(scale, dtype=np.float64),
    )


def write_error_grid(grid, path: str) -> None:
    """Write an error grid as labeled CSV.

    Header row: ``<row_label>/<col_label>`` then one cell per column key;
    each data row starts with its row key.  Values use two-significant-
    digit scientific notation (``8.8e-03``); failed cells say ``FAILED``.
    """
    row_keys = list(grid.row_keys)
    col_keys = list(grid.col_keys)
    if not row_keys or not col_keys:
        raise EmptyInputError("error grid has no rows or no columns")
    values = np.asarray(grid.values)
    failed = np.asarray(grid.failed)
    if values.shape != (len(row_keys), len(col_keys)):
        raise DimensionMismatchError(
            f"grid values shape {values.shape} != {(len(row_keys), len(col_keys))}"
        )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"{grid.row_label}/{grid.col_label}"] + [str(k) for k in col_keys])
        for i, rk in enumerate(row_keys):
            cells = [
                "FAILED" if failed[i, j] else f"{values[i, j]:.1e}"
                for j in range(len(col_keys))
            ]
            writer.writerow([str(rk)] + cells)
