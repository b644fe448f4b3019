"""Learn ODE right-hand sides from uniformly sampled trajectories.

The approach: put a small tanh network in place of the unknown vector
field f in xdot = f(x), form linear-multistep residuals over observed
snapshots, and train the network so those residuals vanish.  The learned
field then forecasts by ordinary numerical integration.
"""

from .benchmarks import (
    HOPF_TRAIN_MU,
    HOPF_TRAIN_RADII,
    GlycolyticParams,
    UnknownDatasetError,
    add_noise,
    cubic_oscillator,
    cylinder_surrogate,
    cylinder_surrogate_dataset,
    draw_glycolytic_ic,
    glycolytic,
    hopf_augmented,
    load_glycolytic_config,
    lorenz,
    standard_dataset,
)
from .core import (
    BadStepError,
    DimensionMismatchError,
    NonFiniteError,
    OdelearnError,
    TimeSeries,
    TooShortError,
    VectorField,
    validate_timeseries,
)
from .dataio import (
    EmptyFileError,
    NonUniformGridError,
    ParseError,
    load_model,
    read_timeseries_csv,
    save_model,
    write_error_grid,
    write_timeseries_csv,
)
from .experiments import (
    ErrorGrid,
    GridMismatchError,
    RunResult,
    StudyResult,
    ZeroReferenceError,
    component_errors,
    cylinder_study,
    derive_seed,
    glycolytic_study,
    hopf_study,
    lorenz_study,
    oscillator_study,
    parse_noise_label,
    relative_l2_error,
    run_identification,
    sweep_architecture,
    sweep_dt_by_noise,
    sweep_scheme_by_steps,
)
from .integrators import NonFiniteStateError, integrate_rk4, rollout
from .model import (
    BadDimsError,
    MlpModel,
    flatten_params,
    loss_and_gradient,
    mlp_init,
    unflatten_params,
)
from .schemes import (
    EmptyInputError,
    InsufficientSamplesError,
    MultistepScheme,
    SchemeFamily,
    UnsupportedStepsError,
    all_schemes,
    mse_loss,
    residuals,
    scheme_coefficients,
)
from .training import DivergedLoss, MixedDimsError, TrainConfig, TrainReport, train, train_multi

__version__ = "0.1.0"

__all__ = [
    "HOPF_TRAIN_MU",
    "HOPF_TRAIN_RADII",
    "BadDimsError",
    "BadStepError",
    "DimensionMismatchError",
    "DivergedLoss",
    "EmptyFileError",
    "EmptyInputError",
    "ErrorGrid",
    "GlycolyticParams",
    "GridMismatchError",
    "InsufficientSamplesError",
    "MixedDimsError",
    "MlpModel",
    "MultistepScheme",
    "NonFiniteError",
    "NonFiniteStateError",
    "NonUniformGridError",
    "OdelearnError",
    "ParseError",
    "RunResult",
    "SchemeFamily",
    "StudyResult",
    "TimeSeries",
    "TooShortError",
    "TrainConfig",
    "TrainReport",
    "UnknownDatasetError",
    "UnsupportedStepsError",
    "VectorField",
    "ZeroReferenceError",
    "add_noise",
    "all_schemes",
    "component_errors",
    "cubic_oscillator",
    "cylinder_study",
    "cylinder_surrogate",
    "cylinder_surrogate_dataset",
    "derive_seed",
    "draw_glycolytic_ic",
    "flatten_params",
    "glycolytic",
    "glycolytic_study",
    "hopf_augmented",
    "hopf_study",
    "integrate_rk4",
    "load_glycolytic_config",
    "load_model",
    "lorenz",
    "lorenz_study",
    "loss_and_gradient",
    "mlp_init",
    "mse_loss",
    "oscillator_study",
    "parse_noise_label",
    "read_timeseries_csv",
    "relative_l2_error",
    "residuals",
    "rollout",
    "run_identification",
    "save_model",
    "scheme_coefficients",
    "standard_dataset",
    "sweep_architecture",
    "sweep_dt_by_noise",
    "sweep_scheme_by_steps",
    "train",
    "train_multi",
    "unflatten_params",
    "validate_timeseries",
    "write_error_grid",
    "write_timeseries_csv",
]
