"""End-to-end studies: train on a benchmark or a file, roll out, score.

The unit of work is :func:`run_identification`: load or generate data,
optionally thin the sampling grid and add measurement noise, train a
network on the multistep residuals, roll the learned field out from the
exact initial condition, and score per-component relative L2 errors.
Sweeps run one identification per grid cell with deterministic per-cell
seeds; failed cells (diverged training or a blown-up rollout) are marked
in the grid instead of aborting the sweep.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .benchmarks import (
    HOPF_TRAIN_MU,
    HOPF_TRAIN_RADII,
    add_noise,
    cylinder_surrogate_dataset,
    draw_glycolytic_ic,
    glycolytic,
    hopf_augmented,
    load_glycolytic_config,
    standard_dataset,
)
from .core import DimensionMismatchError, OdelearnError, TimeSeries
from .dataio import read_timeseries_csv, save_model, write_error_grid, write_timeseries_csv
from .integrators import NonFiniteStateError, integrate_rk4, rollout
from .model import MlpModel
from .schemes import SchemeFamily, scheme_coefficients
from .training import DivergedLoss, TrainConfig, TrainReport, train_multi


class GridMismatchError(OdelearnError):
    """Two trajectories do not share a sampling grid."""


class ZeroReferenceError(OdelearnError):
    """Reference component is identically zero, relative error undefined."""


def relative_l2_error(predicted: TimeSeries, exact: TimeSeries, component: int) -> float:
    """Relative L2 error of one component over the shared grid.

    ``||p_c - e_c|| / ||e_c||`` with the discrete Euclidean norm over
    time samples.  Scale-invariant: multiplying both trajectories by one
    nonzero constant leaves it unchanged.
    """
    if (
        predicted.n_samples != exact.n_samples
        or predicted.dim != exact.dim
        or predicted.dt != exact.dt
        or predicted.t0 != exact.t0
    ):
        raise GridMismatchError(
            f"grids differ: ({predicted.n_samples},{predicted.dim}) at "
            f"dt={predicted.dt},t0={predicted.t0} vs ({exact.n_samples},{exact.dim}) "
            f"at dt={exact.dt},t0={exact.t0}"
        )
    e = exact.states[:, component]
    p = predicted.states[:, component]
    ref = float(np.linalg.norm(e))
    if ref == 0.0:
        raise ZeroReferenceError(f"component {component} of the reference is identically zero")
    return float(np.linalg.norm(p - e) / ref)


def component_errors(predicted: TimeSeries, exact: TimeSeries) -> np.ndarray:
    """Relative L2 error for every component."""
    return np.array([relative_l2_error(predicted, exact, c) for c in range(exact.dim)])


def parse_noise_label(label: "str | float") -> float:
    """Noise level from a table-style label: "0.01%" -> 0.0001."""
    if isinstance(label, (int, float)):
        level = float(label)
    else:
        text = label.strip()
        if text.endswith("%"):
            level = float(text[:-1]) / 100.0
        else:
            level = float(text)
    if level < 0:
        raise ValueError(f"noise level must be >= 0, got {label!r}")
    return level


def derive_seed(master: int, *coords: int) -> int:
    """Deterministic per-cell seed from a master seed and coordinates."""
    seq = np.random.SeedSequence([int(master)] + [int(c) for c in coords])
    return int(seq.generate_state(1)[0])


@dataclass(frozen=True)
class ErrorGrid:
    """A labeled matrix of relative L2 errors, one sweep per component.

    ``failed`` marks cells whose run diverged or blew up; their values
    are not meaningful and are written as an explicit marker, never as a
    silent NaN.
    """

    row_label: str
    col_label: str
    row_keys: "tuple"
    col_keys: "tuple"
    values: np.ndarray
    failed: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        failed = np.array(self.failed, dtype=bool)
        shape = (len(self.row_keys), len(self.col_keys))
        if values.shape != shape or failed.shape != shape:
            raise DimensionMismatchError(
                f"grid shape {values.shape}/{failed.shape} != {shape}"
            )
        ok = ~failed
        if not np.all(np.isfinite(values[ok])) or np.any(values[ok] < 0):
            raise ValueError("non-failed grid entries must be finite and >= 0")
        values = values.copy()
        values[failed] = np.nan
        values.flags.writeable = False
        failed.flags.writeable = False
        object.__setattr__(self, "row_keys", tuple(self.row_keys))
        object.__setattr__(self, "col_keys", tuple(self.col_keys))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "failed", failed)


@dataclass(frozen=True)
class RunResult:
    """Everything produced by one identification run."""

    config: dict
    model: MlpModel
    report: TrainReport
    exact: "TimeSeries | list[TimeSeries]"
    predicted: TimeSeries
    errors: np.ndarray
    out_dir: "str | None"


def _load_source(
    source: str, seed: int, params_path: "str | None"
) -> "tuple[list[TimeSeries], str]":
    """Benchmark name or CSV path -> list of clean trajectories."""
    if os.path.exists(source) or source.endswith(".csv"):
        data = read_timeseries_csv(source)
        label = source
    else:
        data = standard_dataset(source, seed=seed, params_path=params_path)
        label = source
    bundle = [data] if isinstance(data, TimeSeries) else list(data)
    return bundle, label


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, allow_nan=False)


def _run_on_data(
    clean: "list[TimeSeries]",
    source_label: str,
    scheme: str = "am",
    steps: int = 1,
    layers: int = 1,
    neurons: int = 256,
    noise: float = 0.0,
    dt_subsample: int = 1,
    seed: int = 0,
    max_iters: int = 50_000,
    learning_rate: float = 1e-3,
    substeps: int = 10,
    log_every: int = 1000,
    standardize: bool = False,
    out_dir: "str | None" = None,
) -> RunResult:
    family = SchemeFamily.parse(scheme)
    ms = scheme_coefficients(family, steps)
    refs = [ts.subsample(dt_subsample) for ts in clean]
    noise_seeds = [derive_seed(seed, k) for k in range(len(refs))]
    train_data = [add_noise(ts, noise, s) for ts, s in zip(refs, noise_seeds)]

    dim = refs[0].dim
    layer_dims = (dim,) + (neurons,) * layers + (dim,)
    cfg = TrainConfig(
        scheme=ms,
        layer_dims=layer_dims,
        max_iters=max_iters,
        learning_rate=learning_rate,
        seed=seed,
        log_every=log_every,
        standardize_inputs=standardize,
    )
    log_path = os.path.join(out_dir, "train_log.csv") if out_dir else None
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    model, report = train_multi(cfg, train_data, log_path=log_path)

    ref0 = refs[0]
    predicted = rollout(
        model, ref0.states[0], ref0.dt, ref0.n_samples - 1, substeps=substeps, t0=ref0.t0
    )
    errors = component_errors(predicted, ref0)

    config = {
        "source": source_label,
        "scheme": family.short,
        "steps": steps,
        "layers": layers,
        "neurons": neurons,
        "layer_dims": list(layer_dims),
        "n_params": model.n_params,
        "noise": noise,
        "noise_seeds": noise_seeds,
        "dt_subsample": dt_subsample,
        "dt": ref0.dt,
        "seed": seed,
        "max_iters": max_iters,
        "learning_rate": learning_rate,
        "substeps": substeps,
        "log_every": log_every,
        "standardize": standardize,
        "n_trajectories": len(refs),
        "n_samples": [ts.n_samples for ts in refs],
    }

    if out_dir:
        _write_json(os.path.join(out_dir, "config.json"), config)
        save_model(model, os.path.join(out_dir, "model.json"))
        _write_json(
            os.path.join(out_dir, "report.json"),
            {
                "final_loss": report.final_loss,
                "iterations_run": report.iterations_run,
                "wall_time": report.wall_time,
                "loss_history": [list(p) for p in report.loss_history],
            },
        )
        write_timeseries_csv(refs if len(refs) > 1 else ref0, os.path.join(out_dir, "exact.csv"))
        if noise > 0:
            write_timeseries_csv(
                train_data if len(train_data) > 1 else train_data[0],
                os.path.join(out_dir, "train.csv"),
            )
        write_timeseries_csv(predicted, os.path.join(out_dir, "rollout.csv"))
        with open(os.path.join(out_dir, "errors.csv"), "w") as fh:
            fh.write("component,relative_l2_error\n")
            for c, err in enumerate(errors):
                fh.write(f"x{c + 1},{float(err)!r}\n")

    return RunResult(
        config=config,
        model=model,
        report=report,
        exact=refs if len(refs) > 1 else ref0,
        predicted=predicted,
        errors=errors,
        out_dir=out_dir,
    )


def run_identification(source: str, params_path: "str | None" = None, **kwargs) -> RunResult:
    """Identify a system from a benchmark name or a trajectory CSV.

    Pipeline: load or generate clean data, subsample to the requested
    grid, add proportional noise (training copy only), train, roll out
    from the clean initial condition over the full horizon, and score.
    Keyword arguments mirror :func:`_run_on_data`; everything lands in
    the returned config echo, and all outputs are written under
    ``out_dir`` when one is given.
    """
    clean, label = _load_source(source, kwargs.get("seed", 0), params_path)
    return _run_on_data(clean, label, **kwargs)


def _cell_task(args):
    i, j, clean, label, kwargs = args
    try:
        res = _run_on_data(clean, label, **kwargs)
        return i, j, res.errors, None
    except (DivergedLoss, NonFiniteStateError) as e:
        return i, j, None, f"{type(e).__name__}: {e}"


def _run_cells(tasks: "list[tuple]", dim: int, shape: "tuple[int, int]", workers: int):
    """Run sweep cells (optionally in parallel), aggregate in cell order."""
    values = np.zeros(shape + (dim,))
    failed = np.zeros(shape, dtype=bool)
    notes = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell_task, tasks))
    else:
        results = [_cell_task(t) for t in tasks]
    for i, j, errors, failure in sorted(results, key=lambda r: (r[0], r[1])):
        if failure is None:
            values[i, j, :] = errors
        else:
            failed[i, j] = True
            notes[(i, j)] = failure
    return values, failed, notes


def _grids_per_component(
    row_label, col_label, row_keys, col_keys, values, failed, dim
) -> "dict[str, ErrorGrid]":
    out = {}
    for c in range(dim):
        vals = values[:, :, c].copy()
        vals[failed] = np.nan
        out[f"x{c + 1}"] = ErrorGrid(
            row_label=row_label,
            col_label=col_label,
            row_keys=tuple(row_keys),
            col_keys=tuple(col_keys),
            values=vals,
            failed=failed.copy(),
        )
    return out


def _write_grids(out_dir: str, grids: "dict[str, ErrorGrid]", sweep_config: dict, notes) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for comp, grid in grids.items():
        write_error_grid(grid, os.path.join(out_dir, f"errors_{comp}.csv"))
    doc = dict(sweep_config)
    if notes:
        doc["failures"] = {f"{i},{j}": msg for (i, j), msg in notes.items()}
    _write_json(os.path.join(out_dir, "config.json"), doc)


def sweep_scheme_by_steps(
    benchmark: str = "oscillator",
    families: "tuple[str, ...]" = ("ab", "am", "bdf"),
    steps_list: "tuple[int, ...]" = (1, 2, 3, 4, 5),
    layers: int = 1,
    neurons: int = 256,
    seed: int = 0,
    max_iters: int = 50_000,
    learning_rate: float = 1e-3,
    out_dir: "str | None" = None,
    workers: int = 1,
    substeps: int = 10,
) -> "dict[str, ErrorGrid]":
    """Scheme-family x step-count sweep on shared clean data.

    Every cell trains a fresh model (per-cell seed derived from the
    master seed and the cell coordinates) on the same clean trajectory.
    Returns one grid per state component, rows = families, columns = M.
    """
    clean, label = _load_source(benchmark, seed, None)
    dim = clean[0].dim
    tasks = []
    for i, fam in enumerate(families):
        for j, m in enumerate(steps_list):
            cell_dir = os.path.join(out_dir, f"cell_{fam}_{m}") if out_dir else None
            kwargs = dict(
                scheme=fam,
                steps=m,
                layers=layers,
                neurons=neurons,
                seed=derive_seed(seed, i, j),
                max_iters=max_iters,
                learning_rate=learning_rate,
                substeps=substeps,
                out_dir=cell_dir,
            )
            tasks.append((i, j, clean, label, kwargs))
    values, failed, notes = _run_cells(tasks, dim, (len(families), len(steps_list)), workers)
    grids = _grids_per_component(
        "scheme", "steps", families, steps_list, values, failed, dim
    )
    if out_dir:
        _write_grids(
            out_dir,
            grids,
            {
                "sweep": "scheme_by_steps",
                "benchmark": label,
                "families": list(families),
                "steps": list(steps_list),
                "layers": layers,
                "neurons": neurons,
                "seed": seed,
                "max_iters": max_iters,
                "learning_rate": learning_rate,
                "workers": workers,
            },
            notes,
        )
    return grids


def sweep_dt_by_noise(
    benchmark: str = "oscillator",
    subsample_factors: "tuple[int, ...]" = (1, 2, 3, 4, 5),
    noise_labels: "tuple[str, ...]" = ("0.00%", "0.01%", "0.02%"),
    scheme: str = "am",
    steps: int = 1,
    layers: int = 1,
    neurons: int = 256,
    seed: int = 0,
    max_iters: int = 50_000,
    learning_rate: float = 1e-3,
    out_dir: "str | None" = None,
    workers: int = 1,
    substeps: int = 10,
) -> "dict[str, ErrorGrid]":
    """Sampling-gap x noise-level sweep.

    All cells subsample one finely-integrated master trajectory, so they
    share ground truth; rows are the resulting step sizes, columns the
    noise labels (percent strings accepted).
    """
    clean, label = _load_source(benchmark, seed, None)
    dim = clean[0].dim
    base_dt = clean[0].dt
    levels = [parse_noise_label(lbl) for lbl in noise_labels]
    row_keys = [round(base_dt * f, 12) for f in subsample_factors]
    tasks = []
    for i, factor in enumerate(subsample_factors):
        for j, level in enumerate(levels):
            cell_dir = os.path.join(out_dir, f"cell_dt{factor}_noise{j}") if out_dir else None
            kwargs = dict(
                scheme=scheme,
                steps=steps,
                layers=layers,
                neurons=neurons,
                noise=level,
                dt_subsample=factor,
                seed=derive_seed(seed, i, j),
                max_iters=max_iters,
                learning_rate=learning_rate,
                substeps=substeps,
                out_dir=cell_dir,
            )
            tasks.append((i, j, clean, label, kwargs))
    values, failed, notes = _run_cells(
        tasks, dim, (len(subsample_factors), len(noise_labels)), workers
    )
    grids = _grids_per_component("dt", "noise", row_keys, noise_labels, values, failed, dim)
    if out_dir:
        _write_grids(
            out_dir,
            grids,
            {
                "sweep": "dt_by_noise",
                "benchmark": label,
                "subsample_factors": list(subsample_factors),
                "noise_labels": list(noise_labels),
                "scheme": scheme,
                "steps": steps,
                "seed": seed,
                "max_iters": max_iters,
                "learning_rate": learning_rate,
                "workers": workers,
            },
            notes,
        )
    return grids


def sweep_architecture(
    benchmark: str = "oscillator",
    layer_counts: "tuple[int, ...]" = (1, 2, 3),
    widths: "tuple[int, ...]" = (64, 128, 256),
    seed: int = 0,
    max_iters: int = 50_000,
    learning_rate: float = 1e-3,
    out_dir: "str | None" = None,
    workers: int = 1,
    substeps: int = 10,
) -> "dict[str, ErrorGrid]":
    """Depth x width sweep at fixed trapezoidal M=1 and step 0.01."""
    clean, label = _load_source(benchmark, seed, None)
    dim = clean[0].dim
    tasks = []
    for i, nl in enumerate(layer_counts):
        for j, w in enumerate(widths):
            cell_dir = os.path.join(out_dir, f"cell_l{nl}_n{w}") if out_dir else None
            kwargs = dict(
                scheme="am",
                steps=1,
                layers=nl,
                neurons=w,
                seed=derive_seed(seed, i, j),
                max_iters=max_iters,
                learning_rate=learning_rate,
                substeps=substeps,
                out_dir=cell_dir,
            )
            tasks.append((i, j, clean, label, kwargs))
    values, failed, notes = _run_cells(tasks, dim, (len(layer_counts), len(widths)), workers)
    grids = _grids_per_component("layers", "neurons", layer_counts, widths, values, failed, dim)
    if out_dir:
        _write_grids(
            out_dir,
            grids,
            {
                "sweep": "architecture",
                "benchmark": label,
                "layer_counts": list(layer_counts),
                "widths": list(widths),
                "seed": seed,
                "max_iters": max_iters,
                "learning_rate": learning_rate,
                "workers": workers,
            },
            notes,
        )
    return grids


@dataclass(frozen=True)
class StudyResult:
    """A trained model plus study-specific metrics and trajectories."""

    name: str
    config: dict
    model: MlpModel
    report: TrainReport
    metrics: dict
    trajectories: dict
    out_dir: "str | None"


def _finish_study(result: StudyResult) -> StudyResult:
    if result.out_dir:
        os.makedirs(result.out_dir, exist_ok=True)
        _write_json(os.path.join(result.out_dir, "config.json"), result.config)
        _write_json(os.path.join(result.out_dir, "metrics.json"), result.metrics)
        save_model(result.model, os.path.join(result.out_dir, "model.json"))
        for name, data in result.trajectories.items():
            write_timeseries_csv(data, os.path.join(result.out_dir, f"{name}.csv"))
    return result


def hopf_study(
    seed: int = 0,
    max_iters: int = 10_000,
    learning_rate: float = 1e-3,
    out_dir: "str | None" = None,
    test_mu: "tuple[float, ...]" = (-0.15, 0.35),
    test_radius: float = 0.6,
    dt: float = 0.01,
    substeps: int = 10,
    log_every: int = 1000,
) -> StudyResult:
    """Learn the Hopf normal form across its bifurcation parameter.

    Trains one network on the (mu, radius) trajectory bundle with mu
    carried as a constant state, then rolls out at held-out mu values.
    Metrics record, per test mu: the final-sample radius, the mean radius
    over the terminal quarter of the rollout, and the size of the learned
    mu-derivative relative to the (x, y) derivatives (should be near
    zero, since mu never moves).
    """
    train_data = standard_dataset("hopf", dt=dt)
    cfg = TrainConfig(
        scheme=scheme_coefficients("am", 1),
        layer_dims=(3, 256, 3),
        max_iters=max_iters,
        learning_rate=learning_rate,
        seed=seed,
        log_every=log_every,
    )
    model, report = train_multi(cfg, train_data)

    steps = train_data[0].n_samples - 1
    field = hopf_augmented()
    metrics = {"tests": {}}
    trajectories = {"train": train_data}
    for mu in test_mu:
        x0 = np.array([mu, test_radius, 0.0])
        exact = integrate_rk4(field, x0, dt, steps, substeps=substeps)
        pred = rollout(model, x0, dt, steps, substeps=substeps)
        radius = np.hypot(pred.states[:, 1], pred.states[:, 2])
        tail = slice(3 * pred.n_samples // 4, None)
        fhat = model.forward_batch(pred.states)
        mu_drift = float(
            np.mean(np.abs(fhat[:, 0])) / np.mean(np.linalg.norm(fhat[:, 1:], axis=1))
        )
        key = f"mu={mu}"
        metrics["tests"][key] = {
            "mu": mu,
            "final_radius": float(radius[-1]),
            "terminal_orbit_radius": float(radius[tail].mean()),
            "limit_cycle_radius": float(np.sqrt(mu)) if mu > 0 else 0.0,
            "mu_drift_ratio": mu_drift,
            "errors": component_errors(pred, exact).tolist(),
        }
        trajectories[f"test_exact_mu{mu}"] = exact
        trajectories[f"test_rollout_mu{mu}"] = pred
    metrics["final_loss"] = report.final_loss

    config = {
        "study": "hopf",
        "seed": seed,
        "max_iters": max_iters,
        "learning_rate": learning_rate,
        "dt": dt,
        "train_mu": list(HOPF_TRAIN_MU),
        "train_radii": list(HOPF_TRAIN_RADII),
        "test_mu": list(test_mu),
        "test_radius": test_radius,
        "substeps": substeps,
    }
    return _finish_study(
        StudyResult("hopf", config, model, report, metrics, trajectories, out_dir)
    )


def cylinder_study(
    data_path: "str | None" = None,
    seed: int = 0,
    max_iters: int = 20_000,
    learning_rate: float = 1e-3,
    out_dir: "str | None" = None,
    substeps: int = 10,
    log_every: int = 1000,
) -> StudyResult:
    """Learn reduced cylinder-wake dynamics from 3 coordinates.

    Uses the file at ``data_path`` (header t,x1,x2,x3) when given, else
    the in-repo mean-field surrogate trajectory.  Trains trapezoidal M=1,
    rolls out from the first sample, and reports per-component errors,
    errors over the first oscillation period, and the terminal orbit
    radius drift in the (x1, x2) plane against the reference.
    """
    if data_path is None:
        data = cylinder_surrogate_dataset()
        label = "cylinder_surrogate"
    else:
        loaded = read_timeseries_csv(data_path)
        if isinstance(loaded, list):
            if len(loaded) != 1:
                raise DimensionMismatchError("cylinder data must be a single trajectory")
            loaded = loaded[0]
        data = loaded
        label = data_path
    if data.dim != 3:
        raise DimensionMismatchError(f"cylinder data must have 3 components, got {data.dim}")

    cfg = TrainConfig(
        scheme=scheme_coefficients("am", 1),
        layer_dims=(3, 256, 3),
        max_iters=max_iters,
        learning_rate=learning_rate,
        seed=seed,
        log_every=log_every,
    )
    model, report = train_multi(cfg, [data])
    pred = rollout(model, data.states[0], data.dt, data.n_samples - 1, substeps=substeps, t0=data.t0)

    tail = slice(3 * data.n_samples // 4, None)
    r_exact = np.hypot(data.states[tail, 0], data.states[tail, 1]).mean()
    r_pred = np.hypot(pred.states[tail, 0], pred.states[tail, 1]).mean()
    period_samples = min(data.n_samples, max(2, int(round(2 * np.pi / data.dt))))
    metrics = {
        "errors": component_errors(pred, data).tolist(),
        "early_errors": component_errors(
            pred.window(period_samples), data.window(period_samples)
        ).tolist(),
        "terminal_orbit_radius_exact": float(r_exact),
        "terminal_orbit_radius_predicted": float(r_pred),
        "terminal_orbit_drift": float(abs(r_pred - r_exact) / r_exact),
        "final_loss": report.final_loss,
    }
    config = {
        "study": "cylinder",
        "source": label,
        "seed": seed,
        "max_iters": max_iters,
        "learning_rate": learning_rate,
        "substeps": substeps,
    }
    return _finish_study(
        StudyResult(
            "cylinder",
            config,
            model,
            report,
            metrics,
            {"exact": data, "rollout": pred},
            out_dir,
        )
    )


def glycolytic_study(
    seed: int = 0,
    max_iters: int = 20_000,
    learning_rate: float = 1e-3,
    out_dir: "str | None" = None,
    n_fresh: int = 2,
    params_path: "str | None" = None,
    substeps: int = 10,
    log_every: int = 1000,
) -> StudyResult:
    """Learn the 7-species glycolytic oscillator.

    Trains on the standard dataset (initial condition drawn from the
    configured ranges with the study seed), scores the rollout from the
    training initial condition, and also rolls out from ``n_fresh``
    freshly drawn initial conditions for qualitative comparison.
    """
    params, ranges = load_glycolytic_config(params_path)
    data = standard_dataset("glycolytic", seed=seed, params_path=params_path)
    cfg = TrainConfig(
        scheme=scheme_coefficients("am", 1),
        layer_dims=(7, 256, 7),
        max_iters=max_iters,
        learning_rate=learning_rate,
        seed=seed,
        log_every=log_every,
    )
    model, report = train_multi(cfg, [data])
    pred = rollout(model, data.states[0], data.dt, data.n_samples - 1, substeps=substeps)
    errors = component_errors(pred, data)

    trajectories = {"exact": data, "rollout": pred}
    fresh = []
    field = glycolytic(params)
    for k in range(n_fresh):
        ic = draw_glycolytic_ic(ranges, derive_seed(seed, k + 1))
        exact_k = integrate_rk4(field, ic, data.dt, data.n_samples - 1, substeps=substeps)
        try:
            pred_k = rollout(model, ic, data.dt, data.n_samples - 1, substeps=substeps)
            fresh_errors = component_errors(pred_k, exact_k).tolist()
            trajectories[f"fresh_rollout_{k}"] = pred_k
            s7_positive = bool(
                np.all(exact_k.states[:, 6] > 0) and np.all(pred_k.states[:, 6] > 0)
            )
        except NonFiniteStateError:
            fresh_errors = None
            s7_positive = False
        trajectories[f"fresh_exact_{k}"] = exact_k
        fresh.append(
            {"initial_condition": ic.tolist(), "errors": fresh_errors, "s7_positive": s7_positive}
        )

    metrics = {
        "errors": errors.tolist(),
        "s7_positive": bool(np.all(data.states[:, 6] > 0) and np.all(pred.states[:, 6] > 0)),
        "fresh": fresh,
        "final_loss": report.final_loss,
    }
    config = {
        "study": "glycolytic",
        "seed": seed,
        "max_iters": max_iters,
        "learning_rate": learning_rate,
        "n_fresh": n_fresh,
        "params_path": params_path,
        "substeps": substeps,
    }
    return _finish_study(
        StudyResult("glycolytic", config, model, report, metrics, trajectories, out_dir)
    )


def lorenz_study(
    seed: int = 0,
    max_iters: int = 50_000,
    learning_rate: float = 1e-3,
    out_dir: "str | None" = None,
    substeps: int = 10,
    log_every: int = 1000,
) -> StudyResult:
    """Learn the Lorenz system and check attractor capture.

    Pointwise accuracy is only meaningful over a short horizon (chaos
    amplifies any model error exponentially), so metrics separate the
    [0, 2] window errors from full-horizon attractor statistics: state
    bound and the number of sign changes of x (lobe switches).

    States span roughly [-20, 50], which saturates tanh units fed raw
    coordinates, so this study trains with per-component input
    standardization (the affine map is stored inside the model; rollout
    needs no side information).
    """
    res = _run_on_data(
        [standard_dataset("lorenz")],
        "lorenz",
        scheme="am",
        steps=1,
        seed=seed,
        max_iters=max_iters,
        learning_rate=learning_rate,
        substeps=substeps,
        log_every=log_every,
        standardize=True,
    )
    exact, pred = res.exact, res.predicted
    short_n = int(round(2.0 / exact.dt)) + 1
    short_errors = component_errors(pred.window(short_n), exact.window(short_n))
    x = pred.states[:, 0]
    sign_changes = int(np.sum(np.sign(x[1:]) != np.sign(x[:-1])))
    metrics = {
        "short_horizon_errors": short_errors.tolist(),
        "full_horizon_errors": res.errors.tolist(),
        "max_abs_state": float(np.max(np.abs(pred.states))),
        "x_sign_changes": sign_changes,
        "final_loss": res.report.final_loss,
    }
    config = dict(res.config, study="lorenz")
    return _finish_study(
        StudyResult(
            "lorenz",
            config,
            res.model,
            res.report,
            metrics,
            {"exact": exact, "rollout": pred},
            out_dir,
        )
    )


def oscillator_study(
    seed: int = 0,
    max_iters: int = 25_000,
    learning_rate: float = 1e-3,
    out_dir: "str | None" = None,
    substeps: int = 10,
    log_every: int = 1000,
) -> StudyResult:
    """Learn the cubic oscillator with the default trapezoidal setup."""
    res = _run_on_data(
        [standard_dataset("oscillator")],
        "oscillator",
        scheme="am",
        steps=1,
        seed=seed,
        max_iters=max_iters,
        learning_rate=learning_rate,
        substeps=substeps,
        log_every=log_every,
    )
    metrics = {
        "errors": res.errors.tolist(),
        "final_loss": res.report.final_loss,
    }
    config = dict(res.config, study="oscillator")
    return _finish_study(
        StudyResult(
            "oscillator",
            config,
            res.model,
            res.report,
            metrics,
            {"exact": res.exact, "rollout": res.predicted},
            out_dir,
        )
    )
