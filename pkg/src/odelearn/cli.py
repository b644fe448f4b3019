"""Command-line interface.

Verbs: ``generate`` (benchmark to CSV), ``train``, ``rollout``, ``eval``,
``sweep {scheme|dtnoise|arch}``, ``study {hopf|cylinder|glycolytic|
lorenz|oscillator}``.  ``--out`` always names a directory; every command
that writes one also drops a ``config.json`` with the fully resolved
configuration.  On failure the exit code is nonzero and stderr carries a
single JSON line ``{"error": <type>, "message": <text>}``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .benchmarks import add_noise, cylinder_surrogate_dataset, standard_dataset
from .core import OdelearnError, TimeSeries
from .dataio import load_model, read_timeseries_csv, save_model, write_timeseries_csv
from .experiments import (
    component_errors,
    cylinder_study,
    derive_seed,
    glycolytic_study,
    hopf_study,
    lorenz_study,
    oscillator_study,
    parse_noise_label,
    run_identification,
    sweep_architecture,
    sweep_dt_by_noise,
    sweep_scheme_by_steps,
)
from .integrators import rollout
from .schemes import scheme_coefficients
from .training import TrainConfig, train_multi


def _write_config(out_dir: str, config: dict) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "config.json"), "w") as fh:
        json.dump(config, fh, indent=1)


def _load_bundle(path: str) -> "list[TimeSeries]":
    data = read_timeseries_csv(path)
    return [data] if isinstance(data, TimeSeries) else data


def cmd_generate(args: argparse.Namespace) -> int:
    noise = parse_noise_label(args.noise)
    if args.benchmark == "cylinder":
        data = cylinder_surrogate_dataset()
    else:
        data = standard_dataset(args.benchmark, seed=args.seed, params_path=args.params)
    bundle = [data] if isinstance(data, TimeSeries) else data
    bundle = [ts.subsample(args.dt_subsample) for ts in bundle]
    if noise > 0:
        bundle = [add_noise(ts, noise, derive_seed(args.seed, k)) for k, ts in enumerate(bundle)]
    out_path = os.path.join(args.out, "data.csv")
    os.makedirs(args.out, exist_ok=True)
    write_timeseries_csv(bundle if len(bundle) > 1 else bundle[0], out_path)
    _write_config(
        args.out,
        {
            "command": "generate",
            "benchmark": args.benchmark,
            "seed": args.seed,
            "noise": noise,
            "dt_subsample": args.dt_subsample,
            "params": args.params,
            "n_trajectories": len(bundle),
            "n_samples": [ts.n_samples for ts in bundle],
        },
    )
    print(out_path)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    noise = parse_noise_label(args.noise)
    bundle = [ts.subsample(args.dt_subsample) for ts in _load_bundle(args.data)]
    if noise > 0:
        bundle = [add_noise(ts, noise, derive_seed(args.seed, k)) for k, ts in enumerate(bundle)]
    dim = bundle[0].dim
    cfg = TrainConfig(
        scheme=scheme_coefficients(args.scheme, args.steps),
        layer_dims=(dim,) + (args.neurons,) * args.layers + (dim,),
        max_iters=args.iters,
        learning_rate=args.lr,
        seed=args.seed,
        log_every=args.log_every,
        standardize_inputs=args.standardize,
    )
    os.makedirs(args.out, exist_ok=True)
    model, report = train_multi(cfg, bundle, log_path=os.path.join(args.out, "train_log.csv"))
    save_model(model, os.path.join(args.out, "model.json"))
    _write_config(
        args.out,
        {
            "command": "train",
            "data": args.data,
            "scheme": args.scheme,
            "steps": args.steps,
            "layers": args.layers,
            "neurons": args.neurons,
            "layer_dims": list(cfg.layer_dims),
            "n_params": model.n_params,
            "noise": noise,
            "dt_subsample": args.dt_subsample,
            "iters": args.iters,
            "lr": args.lr,
            "seed": args.seed,
            "standardize": args.standardize,
            "final_loss": report.final_loss,
            "wall_time": report.wall_time,
        },
    )
    print(json.dumps({"final_loss": report.final_loss, "iterations": report.iterations_run}))
    return 0


def _reference_rollout(args: argparse.Namespace) -> "tuple[TimeSeries, TimeSeries]":
    model = load_model(args.model)
    data = _load_bundle(args.data)[0]
    pred = rollout(
        model, data.states[0], data.dt, data.n_samples - 1, substeps=args.substeps, t0=data.t0
    )
    return data, pred


def cmd_rollout(args: argparse.Namespace) -> int:
    data, pred = _reference_rollout(args)
    out_path = os.path.join(args.out, "rollout.csv")
    os.makedirs(args.out, exist_ok=True)
    write_timeseries_csv(pred, out_path)
    _write_config(
        args.out,
        {
            "command": "rollout",
            "model": args.model,
            "data": args.data,
            "substeps": args.substeps,
            "n_samples": pred.n_samples,
        },
    )
    print(out_path)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    data, pred = _reference_rollout(args)
    errors = component_errors(pred, data)
    doc = {f"x{c + 1}": float(e) for c, e in enumerate(errors)}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "errors.csv"), "w") as fh:
            fh.write("component,relative_l2_error\n")
            for name, e in doc.items():
                fh.write(f"{name},{e!r}\n")
        _write_config(
            args.out,
            {
                "command": "eval",
                "model": args.model,
                "data": args.data,
                "substeps": args.substeps,
                "errors": doc,
            },
        )
    print(json.dumps(doc))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    iters = args.iters if args.iters is not None else 50_000
    common = dict(
        benchmark=args.benchmark,
        seed=args.seed,
        max_iters=iters,
        learning_rate=args.lr,
        out_dir=args.out,
        workers=args.workers,
    )
    if args.kind == "scheme":
        grids = sweep_scheme_by_steps(**common)
    elif args.kind == "dtnoise":
        grids = sweep_dt_by_noise(**common)
    else:
        grids = sweep_architecture(**common)
    summary = {
        comp: {"failed_cells": int(g.failed.sum()), "min_error": None, "max_error": None}
        for comp, g in grids.items()
    }
    for comp, g in grids.items():
        ok = g.values[~g.failed]
        if ok.size:
            summary[comp]["min_error"] = float(ok.min())
            summary[comp]["max_error"] = float(ok.max())
    print(json.dumps(summary))
    return 0


def cmd_study(args: argparse.Namespace) -> int:
    kwargs = dict(seed=args.seed, learning_rate=args.lr, out_dir=args.out)
    if args.iters is not None:
        kwargs["max_iters"] = args.iters
    if args.kind == "hopf":
        result = hopf_study(**kwargs)
    elif args.kind == "cylinder":
        result = cylinder_study(data_path=args.data, **kwargs)
    elif args.kind == "glycolytic":
        result = glycolytic_study(params_path=args.params, **kwargs)
    elif args.kind == "lorenz":
        result = lorenz_study(**kwargs)
    else:
        result = oscillator_study(**kwargs)
    print(json.dumps(result.metrics))
    return 0


def _add_common(parser: argparse.ArgumentParser, out_required: bool = True) -> None:
    parser.add_argument("--seed", type=int, default=0, help="master random seed")
    parser.add_argument("--out", required=out_required, help="output directory")


def _add_training_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scheme", choices=["ab", "am", "bdf"], default="am")
    parser.add_argument("--steps", type=int, default=1, help="multistep count M")
    parser.add_argument("--layers", type=int, default=1, help="hidden layer count")
    parser.add_argument("--neurons", type=int, default=256, help="hidden layer width")
    parser.add_argument("--noise", default="0", help="noise level, e.g. 0.0001 or 0.01%%")
    parser.add_argument("--dt-subsample", type=int, default=1, help="keep every k-th sample")
    parser.add_argument("--iters", type=int, default=50_000, help="training iterations")
    parser.add_argument("--lr", type=float, default=1e-3, help="learning rate")
    parser.add_argument("--log-every", type=int, default=1000)
    parser.add_argument(
        "--standardize",
        action="store_true",
        help="standardize network inputs (affine map stored in the model)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="odelearn",
        description="Learn ODE right-hand sides from trajectory data via multistep residuals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a benchmark dataset as CSV")
    p.add_argument("benchmark", choices=["oscillator", "lorenz", "hopf", "glycolytic", "cylinder"])
    p.add_argument("--noise", default="0", help="noise level, e.g. 0.0001 or 0.01%%")
    p.add_argument("--dt-subsample", type=int, default=1)
    p.add_argument("--params", default=None, help="parameter config file (glycolytic)")
    _add_common(p)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("train", help="train a model on a trajectory CSV")
    p.add_argument("--data", required=True, help="trajectory CSV")
    _add_training_flags(p)
    _add_common(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("rollout", help="integrate a saved model on a reference grid")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--data", required=True, help="reference trajectory CSV (grid + start state)")
    p.add_argument("--substeps", type=int, default=10)
    _add_common(p)
    p.set_defaults(fn=cmd_rollout)

    p = sub.add_parser("eval", help="rollout plus per-component relative L2 errors")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--substeps", type=int, default=10)
    _add_common(p, out_required=False)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("sweep", help="error grid over a parameter grid")
    p.add_argument("kind", choices=["scheme", "dtnoise", "arch"])
    p.add_argument("--benchmark", default="oscillator")
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("study", help="reproduce one benchmark study end to end")
    p.add_argument("kind", choices=["hopf", "cylinder", "glycolytic", "lorenz", "oscillator"])
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--data", default=None, help="trajectory CSV (cylinder)")
    p.add_argument("--params", default=None, help="parameter config file (glycolytic)")
    _add_common(p)
    p.set_defaults(fn=cmd_study)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OdelearnError, OSError, ValueError) as e:
        line = json.dumps({"error": type(e).__name__, "message": str(e)})
        print(line, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
