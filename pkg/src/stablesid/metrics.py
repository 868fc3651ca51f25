"""Basis-invariant model evaluation.

The frequency response of the whole system (input and innovation channels,
unit sampling frequency) is

    F(w) = C (exp(jw) I - A)^{-1} [B, K] + [0, I_d],

and estimation error is measured by the sampled supremum of the largest
singular value of the response difference: the hard error over [0, pi] and
the soft error over [0, SOFT_OMEGA_MAX].  Both are invariant under state
similarity transforms, which makes them comparable across methods that
identify the state basis only up to similarity.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, TypeVar

import numpy as np
import scipy.linalg

from .exceptions import SingularResolvent
from .instrumentation import record
from .linalg import _as_matrix, _as_square, eigenvalues

SOFT_OMEGA_MAX = 3.0

T = TypeVar("T")


def _system_matrices(sys) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Accept a StateSpaceModel-like object or an (A, B, C, K) tuple."""
    if hasattr(sys, "A"):
        quad = (sys.A, sys.B, sys.C, sys.K)
    else:
        quad = tuple(sys)
    A = _as_square(quad[0], "A")
    B = _as_matrix(quad[1], "B")
    C = _as_matrix(quad[2], "C")
    K = _as_matrix(quad[3], "K")
    return A, B, C, K


def frequency_response(A, B, C, K, omega: float) -> np.ndarray:
    """Response matrix F(omega), shape (d, m+d), at a single frequency."""
    A = _as_square(A, "A")
    B = _as_matrix(B, "B")
    C = _as_matrix(C, "C")
    K = _as_matrix(K, "K")
    d, m = C.shape[0], B.shape[1]
    BK = np.hstack([B, K])
    z = np.exp(1j * float(omega))
    record("lu")
    try:
        X = np.linalg.solve(z * np.eye(A.shape[0]) - A, BK)
    except np.linalg.LinAlgError as exc:
        raise SingularResolvent(f"exp(j*{omega}) is an eigenvalue of A") from exc
    F = C @ X + np.hstack([np.zeros((d, m)), np.eye(d)])
    if not np.isfinite(F).all():
        raise SingularResolvent(f"response not finite at omega={omega}")
    return F


def frequency_response_grid(sys, omegas) -> np.ndarray:
    """Response stack of shape (len(omegas), d, m+d).

    One complex Schur factorization up front, then a triangular solve per
    frequency, so a 1000-point sweep stays cheap even at order 1024.
    """
    A, B, C, K = _system_matrices(sys)
    omegas = np.asarray(omegas, dtype=float).ravel()
    d, m = C.shape[0], B.shape[1]
    record("schur")
    T_schur, Z = scipy.linalg.schur(A, output="complex")
    BK = Z.conj().T @ np.hstack([B, K]).astype(complex)
    CZ = (C @ Z).astype(complex)
    feed = np.hstack([np.zeros((d, m)), np.eye(d)])
    out = np.empty((omegas.size, d, m + d), dtype=complex)
    M = np.empty_like(T_schur)
    idx = np.diag_indices_from(M)
    for i, omega in enumerate(omegas):
        np.copyto(M, -T_schur)
        M[idx] += np.exp(1j * omega)
        try:
            X = scipy.linalg.solve_triangular(M, BK, lower=False)
        except np.linalg.LinAlgError as exc:
            raise SingularResolvent(
                f"exp(j*{omega}) is an eigenvalue of A"
            ) from exc
        out[i] = CZ @ X + feed
    if not np.isfinite(out).all():
        raise SingularResolvent("response grid contains non-finite values")
    return out


def _sigma_max(stack: np.ndarray) -> np.ndarray:
    """Largest singular value of each (d, m+d) slice of a response stack."""
    return np.linalg.svd(stack, compute_uv=False)[..., 0]


def hinf_error(true_sys, est_sys, omega_max: float, grid: int = 1000) -> float:
    """Sampled supremum of sigma_max(F_est - F_true) over [0, omega_max].

    The grid is inclusive and equally spaced with ``grid`` points; refining
    the grid can only increase the reported value.
    """
    if grid < 2:
        raise ValueError("grid must have at least 2 points")
    omegas = np.linspace(0.0, float(omega_max), grid)
    diff = frequency_response_grid(est_sys, omegas) - frequency_response_grid(
        true_sys, omegas
    )
    return float(_sigma_max(diff).max())


@dataclass(frozen=True)
class HinfReport:
    """Hard (omega_max = pi) and soft (omega_max = 3) sampled errors.

    Both errors are evaluated on the union of the two inclusive grids, so
    soft_error <= hard_error holds structurally.
    """

    hard_error: float
    soft_error: float
    grid_points: int
    argmax_omega: float


def evaluation_grid(grid: int = 1000) -> np.ndarray:
    """Union of the hard [0, pi] and soft [0, 3] inclusive grids, sorted."""
    hard = np.linspace(0.0, np.pi, grid)
    soft = np.linspace(0.0, SOFT_OMEGA_MAX, grid)
    return np.unique(np.concatenate([hard, soft]))


def hinf_from_responses(omegas, F_true, F_est, grid_points: int) -> HinfReport:
    """Build a report from precomputed response stacks on a shared grid."""
    omegas = np.asarray(omegas, dtype=float)
    sig = _sigma_max(np.asarray(F_est) - np.asarray(F_true))
    i_hard = int(np.argmax(sig))
    soft_mask = omegas <= SOFT_OMEGA_MAX + 1e-12
    soft = float(sig[soft_mask].max()) if soft_mask.any() else 0.0
    return HinfReport(
        hard_error=float(sig[i_hard]),
        soft_error=soft,
        grid_points=grid_points,
        argmax_omega=float(omegas[i_hard]),
    )


def hinf_report(true_sys, est_sys, grid: int = 1000) -> HinfReport:
    """Hard and soft errors of an estimated system against the truth."""
    omegas = evaluation_grid(grid)
    F_true = frequency_response_grid(true_sys, omegas)
    F_est = frequency_response_grid(est_sys, omegas)
    return hinf_from_responses(omegas, F_true, F_est, grid)


def pole_magnitudes(A) -> np.ndarray:
    """Eigenvalue moduli in decreasing order."""
    return np.sort(np.abs(eigenvalues(A)))[::-1]


def timed(stage_label: str, thunk: Callable[[], T]) -> tuple[T, float]:
    """Run a thunk and return (result, wall-clock seconds on a monotonic clock)."""
    start = time.perf_counter()
    result = thunk()
    return result, time.perf_counter() - start
