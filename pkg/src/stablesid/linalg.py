"""Dense matrix kernels used throughout the package.

Symmetric square roots, Sylvester and discrete Lyapunov solvers, spectra,
and single-output observer pole placement.  All functions are pure and
reject non-finite input.

Tolerances are package-wide decisions:

* ``SYM_TOL``: relative asymmetry allowed in a "symmetric" input.
* ``PSD_FLOOR``: eigenvalues at or below ``PSD_FLOOR * ||S||`` make a
  nominally positive definite matrix count as degenerate.  Degenerate input
  raises rather than being clamped; clamping would silently change the
  estimators built on top of these kernels.
* ``EIG_SEPARATION_TOL``: two spectra closer than this are treated as
  sharing an eigenvalue.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .exceptions import (
    CommonEigenvalues,
    NotObservable,
    NotPositiveDefinite,
    UnstableMatrix,
    UnsupportedDimension,
)
from .instrumentation import record

SYM_TOL = 1e-10
PSD_FLOOR = 1e-12
EIG_SEPARATION_TOL = 1e-9


def _as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-d float array and reject NaN/Inf."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-d, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _as_square(a, name: str = "matrix") -> np.ndarray:
    arr = _as_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    return arr


def _sym_eig(S, name: str) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix, asymmetry checked first."""
    S = _as_square(S, name)
    scale = np.abs(S).max()
    if scale > 0 and np.abs(S - S.T).max() > SYM_TOL * scale:
        raise NotPositiveDefinite(f"{name} is not symmetric")
    record("eigh")
    w, V = np.linalg.eigh((S + S.T) / 2.0)
    return w, V


def sym_sqrt(S) -> np.ndarray:
    """Unique symmetric square root of a symmetric positive definite matrix.

    Raises NotPositiveDefinite when any eigenvalue falls at or below
    ``PSD_FLOOR * ||S||``; a degenerate sample covariance should surface as
    an error, not be repaired.
    """
    w, V = _sym_eig(S, "S")
    floor = PSD_FLOOR * max(w.max(), 0.0)
    if w.min() <= floor:
        raise NotPositiveDefinite(
            f"matrix is not positive definite (min eigenvalue {w.min():.3e})"
        )
    R = (V * np.sqrt(w)) @ V.T
    return (R + R.T) / 2.0


def sym_inv_sqrt(S) -> np.ndarray:
    """Symmetric inverse square root: returns R with R @ S @ R = I."""
    w, V = _sym_eig(S, "S")
    floor = PSD_FLOOR * max(w.max(), 0.0)
    if w.min() <= floor:
        raise NotPositiveDefinite(
            f"matrix is not positive definite (min eigenvalue {w.min():.3e})"
        )
    R = (V / np.sqrt(w)) @ V.T
    return (R + R.T) / 2.0


def eigenvalues(A) -> np.ndarray:
    """Eigenvalues of a square matrix, with multiplicity."""
    A = _as_square(A, "A")
    record("eig")
    return np.linalg.eigvals(A)


def spectral_radius(A) -> float:
    """Largest eigenvalue modulus."""
    return float(np.abs(eigenvalues(A)).max())


def largest_singular_value(A) -> float:
    """Largest singular value."""
    A = _as_matrix(A, "A")
    record("svd")
    return float(np.linalg.svd(A, compute_uv=False)[0])


def solve_sylvester(A, A_u, B) -> np.ndarray:
    """Solve A @ M - M @ A_u + B = 0 for M.

    The equation has a unique solution iff A and A_u share no eigenvalue;
    spectra closer than ``EIG_SEPARATION_TOL`` raise CommonEigenvalues.
    Solved by the Schur (Bartels-Stewart) method; tests cross-check against
    an independent Kronecker vectorization solve.
    """
    A = _as_square(A, "A")
    A_u = _as_square(A_u, "A_u")
    B = _as_matrix(B, "B")
    if B.shape != (A.shape[0], A_u.shape[0]):
        raise ValueError(
            f"B must be {A.shape[0]}x{A_u.shape[0]}, got {B.shape}"
        )
    gap = np.abs(eigenvalues(A)[:, None] - eigenvalues(A_u)[None, :]).min()
    if gap < EIG_SEPARATION_TOL:
        raise CommonEigenvalues(
            f"A and A_u have eigenvalues within {gap:.3e} of each other"
        )
    record("sylvester")
    # scipy solves A X + X B = Q
    return scipy.linalg.solve_sylvester(A, -A_u, -B)


def solve_dlyap(A, Q) -> np.ndarray:
    """Solve the discrete Lyapunov equation P = A @ P @ A' + Q.

    Requires spectral radius of A below one and symmetric Q.  The result is
    symmetrized; it is positive definite whenever Q is.
    """
    A = _as_square(A, "A")
    Q = _as_square(Q, "Q")
    if Q.shape != A.shape:
        raise ValueError(f"Q must match A, got {Q.shape} vs {A.shape}")
    scale = np.abs(Q).max()
    if scale > 0 and np.abs(Q - Q.T).max() > SYM_TOL * scale:
        raise ValueError("Q must be symmetric")
    rho = spectral_radius(A)
    if rho >= 1.0:
        raise UnstableMatrix(f"spectral radius {rho:.6f} >= 1")
    record("sylvester")
    P = scipy.linalg.solve_discrete_lyapunov(A, (Q + Q.T) / 2.0, method="bilinear")
    return (P + P.T) / 2.0


def place_observer_poles(A, C, targets) -> np.ndarray:
    """Gain K such that A - K @ C has the requested eigenvalues (d = 1 only).

    ``targets`` must be closed under conjugation.  For A with distinct
    eigenvalues the gain comes from the modal partial-fraction identity

        det(zI - A + KC) / det(zI - A) = 1 + C (zI - A)^{-1} K,

    whose residues give the gain in modal coordinates.  Products are
    accumulated in log space so the construction stays usable at n = 1024.
    A companion-form (Ackermann) fallback covers repeated eigenvalues of A
    at small n.

    Raises NotObservable when a mode is invisible from C, and
    UnsupportedDimension for more than one output.
    """
    A = _as_square(A, "A")
    C = _as_matrix(C, "C")
    n = A.shape[0]
    if C.shape[0] != 1:
        raise UnsupportedDimension(f"placement implemented for d = 1, got d = {C.shape[0]}")
    if C.shape[1] != n:
        raise ValueError(f"C must be 1x{n}, got {C.shape}")
    targets = np.asarray(targets, dtype=complex).ravel()
    if targets.size != n:
        raise ValueError(f"need {n} target eigenvalues, got {targets.size}")
    closure = np.sort_complex(np.conj(targets))
    if not np.allclose(np.sort_complex(targets), closure, atol=1e-12):
        raise ValueError("targets must be closed under conjugation")

    record("eig")
    lam, V = np.linalg.eig(A)
    gaps = np.abs(lam[:, None] - lam[None, :]) + np.eye(n)
    scale = max(np.abs(lam).max(), 1.0)
    if gaps.min() < 1e-9 * scale:
        return _ackermann_gain(A, C, targets)

    c_modal = (C @ V).ravel()
    if np.abs(c_modal).min() <= 1e-12 * max(np.abs(c_modal).max(), 1.0):
        raise NotObservable("a mode of A is invisible from C")

    with np.errstate(divide="ignore"):
        log_q = np.array([np.sum(np.log(lam[j] - targets)) for j in range(n)])
        log_ap = np.array(
            [np.sum(np.log(np.delete(lam[j] - lam, j))) for j in range(n)]
        )
    k_modal = np.exp(log_q - log_ap) / c_modal
    K = (V @ k_modal).real.reshape(n, 1)
    if not np.isfinite(K).all():
        raise NotObservable("placement produced a non-finite gain")
    return K


def _ackermann_gain(A: np.ndarray, C: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Observer Ackermann formula K = q(A) O^{-1} e_n; small n only."""
    n = A.shape[0]
    obs = np.empty((n, n))
    row = C.copy()
    for k in range(n):
        obs[k] = row
        row = row @ A
    record("svd")
    if np.linalg.matrix_rank(obs) < n:
        raise NotObservable("observability matrix is rank deficient")
    coeffs = np.atleast_1d(np.poly(targets).real)
    qA = np.zeros_like(A)
    for c in coeffs:
        qA = qA @ A + c * np.eye(n)
    e_n = np.zeros(n)
    e_n[-1] = 1.0
    record("lu")
    return (qA @ np.linalg.solve(obs, e_n)).reshape(n, 1)
