"""Stability-guaranteed subspace identification for input-output systems.

The package identifies innovations-form state-space models driven by a
VAR(1) input.  The transition estimates for both the system and the input
law come from correlation-weighted covariance products whose spectral
radius is below one on any genuine trajectory, so the returned models are
stable by construction, in closed form, with no tuning parameters.
"""

__version__ = "0.1.0"

from . import docio, exceptions, harness, linalg, metrics
from .cva import (
    CvaDecomposition,
    HankelBlocks,
    LsEstimates,
    SubspaceConfig,
    build_hankel,
    cva_states,
    ls_system_estimates,
    partial_covariances,
    project_out,
)
from .datafiles import read_dataset, write_dataset
from .harness import ExperimentConfig, run_consistency, run_highdim, run_lowdim
from .instrumentation import count_factorizations
from .metrics import HinfReport, frequency_response, hinf_error, hinf_report, pole_magnitudes
from .pipeline import (
    StableIdResult,
    estimate_Au,
    identify,
    stable_A_from_states,
    transform_states,
)
from .ssmodel import (
    AssumptionReport,
    Dataset,
    MarkovState,
    StateSpaceModel,
    build_highdim_example,
    build_lowdim_example,
    check_assumptions,
    load_model,
    markov_transform,
    save_model,
    simulate_experiment,
    simulate_ss,
)
from .var1 import (
    LagCovTriple,
    Var1Model,
    cs_estimate,
    cs_estimate_general,
    lag_covariances,
    ls_estimate,
    simulate_var1,
)

__all__ = [
    "__version__",
    "AssumptionReport",
    "CvaDecomposition",
    "Dataset",
    "ExperimentConfig",
    "HankelBlocks",
    "HinfReport",
    "LagCovTriple",
    "LsEstimates",
    "MarkovState",
    "StableIdResult",
    "StateSpaceModel",
    "SubspaceConfig",
    "Var1Model",
    "build_hankel",
    "build_highdim_example",
    "build_lowdim_example",
    "check_assumptions",
    "count_factorizations",
    "cs_estimate",
    "cs_estimate_general",
    "cva_states",
    "docio",
    "estimate_Au",
    "exceptions",
    "frequency_response",
    "harness",
    "hinf_error",
    "hinf_report",
    "identify",
    "lag_covariances",
    "linalg",
    "load_model",
    "ls_estimate",
    "ls_system_estimates",
    "markov_transform",
    "metrics",
    "partial_covariances",
    "pole_magnitudes",
    "project_out",
    "read_dataset",
    "run_consistency",
    "run_highdim",
    "run_lowdim",
    "save_model",
    "simulate_experiment",
    "simulate_ss",
    "simulate_var1",
    "transform_states",
    "write_dataset",
]
