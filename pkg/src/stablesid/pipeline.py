"""The closed-form stable identification pipeline.

Given input-output data, the pipeline runs a fixed sequence of
factorizations, with no iteration to convergence anywhere:

1. a correlation-weighted stable estimate of the input transition matrix
   from the full input series;
2. the CVA subspace front end (Hankel stacks, partial covariances, weighted
   SVD, state estimates, least squares), whose transition estimate A_star
   carries no stability guarantee;
3. a Sylvester solve A_star M - M A_u + B = 0 that removes the input drive
   from the estimated states;
4. the same correlation-weighted estimator on the transformed states,
   yielding a transition estimate with spectral radius below one.

Only the transition matrix is replaced by the stable estimate; B, C, K and
the innovation covariance keep their least-squares values.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg
from .cva import (
    LsEstimates,
    SubspaceConfig,
    build_hankel,
    cva_states,
    ls_system_estimates,
    partial_covariances,
)
from .exceptions import DimensionMismatch, StableSidError
from .ssmodel import Dataset, StateSpaceModel
from .var1 import cs_estimate, lag_covariances


@dataclass
class StableIdResult:
    """Everything one identification produces.

    ``A_hat`` and ``A_u_hat`` are stable by construction; ``ls`` holds the
    raw least-squares estimates including the unguaranteed ``A_star``.
    ``diagnostics`` carries spectral radii, the largest singular value of
    the correlation matrices behind each stable estimate, the relative
    Sylvester residual, and per-stage wall-clock timings.
    """

    A_u_hat: np.ndarray
    ls: LsEstimates
    M_hat: np.ndarray
    A_hat: np.ndarray
    singular_values: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def estimated_model(self) -> StateSpaceModel:
        """The stable estimate packaged as a model (A_hat with LS B, C, K)."""
        return StateSpaceModel(
            A=self.A_hat,
            B=self.ls.B_hat,
            C=self.ls.C_hat,
            K=self.ls.K_hat,
            Q_eps=self.ls.Q_eps_hat,
        )


def estimate_Au(data) -> np.ndarray:
    """Stable estimate of the input VAR(1) transition from the full series.

    Uses every input sample, not just the subspace window; the result has
    spectral radius below one for any genuine trajectory.
    """
    U = data.U if isinstance(data, Dataset) else np.atleast_2d(np.asarray(data, float))
    cov = lag_covariances(U)
    return cs_estimate(cov)


def transform_states(X_hat, U_window, M_hat) -> np.ndarray:
    """Column-wise transform x - M u that strips the input drive."""
    X_hat = np.asarray(X_hat, dtype=float)
    U_window = np.atleast_2d(np.asarray(U_window, dtype=float))
    M_hat = np.asarray(M_hat, dtype=float)
    if X_hat.shape[1] != U_window.shape[1]:
        raise DimensionMismatch(
            f"states have {X_hat.shape[1]} columns, inputs {U_window.shape[1]}"
        )
    if M_hat.shape != (X_hat.shape[0], U_window.shape[0]):
        raise DimensionMismatch(
            f"M must be {X_hat.shape[0]}x{U_window.shape[0]}, got {M_hat.shape}"
        )
    return X_hat - M_hat @ U_window


def stable_A_from_states(Z_check) -> np.ndarray:
    """Correlation-weighted stable transition estimate from a state sequence."""
    cov = lag_covariances(np.asarray(Z_check, dtype=float))
    return cs_estimate(cov)


def _run_stage(label: str, timings: dict, fn: Callable):
    start = time.perf_counter()
    try:
        return fn()
    except StableSidError as exc:
        exc.stage = label
        raise
    finally:
        timings[label] = time.perf_counter() - start


def identify(data: Dataset, cfg: SubspaceConfig) -> StableIdResult:
    """Run the full pipeline on one dataset.

    Deterministic given (data, cfg).  Errors raised by any stage carry the
    stage name on their ``stage`` attribute.
    """
    timings: dict[str, float] = {}
    total_start = time.perf_counter()

    def stage_estimate_au():
        cov = lag_covariances(data.U)
        return cs_estimate(cov, return_sigma=True)

    (A_u_hat, sigma_u) = _run_stage("estimate_Au", timings, stage_estimate_au)
    blocks = _run_stage("build_hankel", timings, lambda: build_hankel(data, cfg))
    covs = _run_stage(
        "partial_covariances", timings, lambda: partial_covariances(blocks)
    )
    decomp = _run_stage("cva_states", timings, lambda: cva_states(blocks, covs, cfg))
    ls = _run_stage(
        "ls_estimates",
        timings,
        lambda: ls_system_estimates(decomp.X_hat, blocks.U0, blocks.Y0),
    )
    M_hat = _run_stage(
        "solve_sylvester",
        timings,
        lambda: linalg.solve_sylvester(ls.A_star, A_u_hat, ls.B_hat),
    )
    Z_check = _run_stage(
        "transform_states",
        timings,
        lambda: transform_states(decomp.X_hat, blocks.U_window, M_hat),
    )

    def stage_stable_a():
        cov = lag_covariances(Z_check)
        return cs_estimate(cov, return_sigma=True)

    (A_hat, sigma_r) = _run_stage("stable_A", timings, stage_stable_a)
    timings["total"] = time.perf_counter() - total_start

    residual = ls.A_star @ M_hat - M_hat @ A_u_hat + ls.B_hat
    denom = (
        np.linalg.norm(ls.A_star) * np.linalg.norm(M_hat)
        + np.linalg.norm(M_hat) * np.linalg.norm(A_u_hat)
        + np.linalg.norm(ls.B_hat)
    )
    diagnostics = {
        "rho_A_star": linalg.spectral_radius(ls.A_star),
        "rho_A_hat": linalg.spectral_radius(A_hat),
        "rho_Au_hat": linalg.spectral_radius(A_u_hat),
        "sigma_R": float(sigma_r),
        "sigma_R_u": float(sigma_u),
        "sylvester_residual": float(np.linalg.norm(residual) / denom) if denom else 0.0,
        "timings": timings,
    }
    return StableIdResult(
        A_u_hat=A_u_hat,
        ls=ls,
        M_hat=M_hat,
        A_hat=A_hat,
        singular_values=decomp.singular_values,
        diagnostics=diagnostics,
    )
