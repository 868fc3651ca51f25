"""Canonical variate analysis subspace front end.

From input-output data this builds the stacked past/future data matrices,
removes the future-input contribution by projection, whitens the remaining
partial covariances, and reads state estimates off a truncated SVD:

    SVD of  Sff^{-1/2} Sfp Spp^{-1/2}  ->  U L V'
    Kp = L_n^{1/2} V_n' Spp^{-1/2},     X = Kp Zp

followed by least squares for the system matrices.  The singular values are
canonical correlations and always lie in [0, 1] on trajectory data.

Column t of the past stack holds [y[t-1] .. y[t-p]; u[t-1] .. u[t-p]] (most
recent lag first, outputs above inputs); column t of a future stack holds
[w[t]; ...; w[t+f-1]].  With data of length Tbar+1 the usable columns are
t = p .. p+T for T = Tbar - f - p + 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg
from .exceptions import (
    InsufficientSamples,
    OrderTooLarge,
    RankDeficientRegressors,
)
from .instrumentation import record
from .ssmodel import Dataset

#: singular values closer than this (relative) are tied and need a tiebreak
SVD_TIE_TOL = 1e-12


@dataclass(frozen=True)
class SubspaceConfig:
    """Lags and model order for one identification.

    ``f`` and ``p`` are the future and past stacking depths, ``n_hat`` the
    state order to keep.  Both lags must reach the order; the effective
    column count T = Tbar - f - p + 1 must exceed (d+m)p for the past
    covariance to be positive definite.
    """

    f: int
    p: int
    n_hat: int

    def __post_init__(self):
        if self.n_hat < 1:
            raise ValueError("n_hat must be positive")
        if self.f < self.n_hat or self.p < self.n_hat:
            raise ValueError(
                f"lags must reach the order: f={self.f}, p={self.p}, n_hat={self.n_hat}"
            )

    def effective_samples(self, Tbar: int) -> int:
        return Tbar - self.f - self.p + 1


@dataclass
class HankelBlocks:
    """Stacked data matrices sharing one column alignment.

    Zp stacks lagged past outputs and inputs, Yf/Uf the future windows.
    U0/Y0 are the single-lag slices (columns p .. p+T-1) the least-squares
    step regresses on, and U_window the inputs u[p] .. u[p+T] aligned with
    the estimated states.
    """

    Zp: np.ndarray
    Yf: np.ndarray
    Uf: np.ndarray
    U0: np.ndarray
    Y0: np.ndarray
    U_window: np.ndarray
    T: int
    p: int
    d: int
    m: int


def build_hankel(data: Dataset, cfg: SubspaceConfig) -> HankelBlocks:
    """Assemble past/future stacks for columns t = p .. p+T."""
    Tbar = data.Tbar
    T = cfg.effective_samples(Tbar)
    if T < 1:
        raise InsufficientSamples(
            f"Tbar={Tbar} too short for f={cfg.f}, p={cfg.p}"
        )
    if T <= (data.d + data.m) * cfg.p:
        raise InsufficientSamples(
            f"T={T} must exceed (d+m)p={(data.d + data.m) * cfg.p} for a PD past covariance"
        )
    U, Y = data.U, data.Y
    cols = np.arange(cfg.p, cfg.p + T + 1)
    y_past = np.vstack([Y[:, cols - k] for k in range(1, cfg.p + 1)])
    u_past = np.vstack([U[:, cols - k] for k in range(1, cfg.p + 1)])
    Zp = np.vstack([y_past, u_past])
    Yf = np.vstack([Y[:, cols + k] for k in range(cfg.f)])
    Uf = np.vstack([U[:, cols + k] for k in range(cfg.f)])
    return HankelBlocks(
        Zp=Zp,
        Yf=Yf,
        Uf=Uf,
        U0=U[:, cols[:-1]],
        Y0=Y[:, cols[:-1]],
        U_window=U[:, cols],
        T=T,
        p=cfg.p,
        d=data.d,
        m=data.m,
    )


def project_out(Y, U) -> np.ndarray:
    """Residual of the rows of Y after regression on the rows of U.

    Computes Y - (Y U')(U U')^{-1} U by a Cholesky solve of the Gram matrix;
    the sample-by-sample projector is never formed.  Raises
    RankDeficientRegressors when U U' is singular.
    """
    Y = np.asarray(Y, dtype=float)
    U = np.asarray(U, dtype=float)
    if Y.shape[1] != U.shape[1]:
        raise ValueError(f"column mismatch: {Y.shape} vs {U.shape}")
    gram = U @ U.T
    try:
        record("cholesky")
        factor = scipy.linalg.cho_factor(gram)
    except np.linalg.LinAlgError as exc:
        raise RankDeficientRegressors("regressor Gram matrix is singular") from exc
    return Y - scipy.linalg.cho_solve(factor, U @ Y.T).T @ U


def partial_covariances(blocks: HankelBlocks) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Covariances of future outputs and past data with future inputs removed.

    Returns (Sff, Sfp, Spp).  Symmetric blocks are built as Gram matrices of
    the projected data, so they are symmetric positive semidefinite by
    construction.
    """
    Yf_perp = project_out(blocks.Yf, blocks.Uf)
    Zp_perp = project_out(blocks.Zp, blocks.Uf)
    T = blocks.T
    Sff = Yf_perp @ Yf_perp.T / T
    Sfp = Yf_perp @ Zp_perp.T / T
    Spp = Zp_perp @ Zp_perp.T / T
    return (Sff + Sff.T) / 2.0, Sfp, (Spp + Spp.T) / 2.0


@dataclass
class CvaDecomposition:
    """Weighted SVD of the partial covariances and the derived states.

    ``singular_values`` holds the full canonical-correlation spectrum in
    decreasing order; ``Kp_hat`` maps stacked past data to states, and
    ``X_hat = Kp_hat @ Zp`` exactly.  ``Of_hat`` is the extended
    observability factor and ``beta_z`` the unconstrained partial-regression
    coefficient that ``Of_hat @ Kp_hat`` approximates at rank n_hat.
    """

    Sff: np.ndarray
    Sfp: np.ndarray
    Spp: np.ndarray
    singular_values: np.ndarray
    Kp_hat: np.ndarray
    Of_hat: np.ndarray
    X_hat: np.ndarray
    beta_z: np.ndarray


def _canonical_svd(G: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """SVD with deterministic signs and a deterministic order under ties.

    Each singular-vector pair is flipped so the largest-magnitude entry of
    the left vector is positive.  Runs of equal singular values are ordered
    by the first nonzero entry of the canonicalized left vectors, making the
    decomposition reproducible across BLAS builds.
    """
    record("svd")
    U, s, Vt = np.linalg.svd(G, full_matrices=False)
    for i in range(s.size):
        j = int(np.argmax(np.abs(U[:, i])))
        if U[j, i] < 0:
            U[:, i] = -U[:, i]
            Vt[i] = -Vt[i]
    scale = s[0] if s.size and s[0] > 0 else 1.0
    order = list(range(s.size))
    i = 0
    while i < len(order) - 1:
        j = i
        while j + 1 < len(order) and abs(s[order[j + 1]] - s[order[i]]) <= SVD_TIE_TOL * scale:
            j += 1
        if j > i:
            def first_nonzero(col: int) -> float:
                u = U[:, col]
                nz = np.nonzero(np.abs(u) > 1e-14)[0]
                return float(u[nz[0]]) if nz.size else 0.0

            order[i : j + 1] = sorted(order[i : j + 1], key=first_nonzero, reverse=True)
        i = j + 1
    if order != list(range(s.size)):
        U, s, Vt = U[:, order], s[order], Vt[order]
    return U, s, Vt


def cva_states(
    blocks: HankelBlocks,
    covs: tuple[np.ndarray, np.ndarray, np.ndarray],
    cfg: SubspaceConfig,
) -> CvaDecomposition:
    """Whiten, decompose, and map past data to state estimates."""
    Sff, Sfp, Spp = covs
    max_order = min(Sff.shape[0], Spp.shape[0])
    if cfg.n_hat > max_order:
        raise OrderTooLarge(
            f"n_hat={cfg.n_hat} exceeds min(d*f, (d+m)*p)={max_order}"
        )
    Wff = linalg.sym_inv_sqrt(Sff)
    Wpp = linalg.sym_inv_sqrt(Spp)
    U, s, Vt = _canonical_svd(Wff @ Sfp @ Wpp)
    root = np.sqrt(s[: cfg.n_hat])
    Kp_hat = (root[:, None] * Vt[: cfg.n_hat]) @ Wpp
    X_hat = Kp_hat @ blocks.Zp
    Of_hat = linalg.sym_sqrt(Sff) @ (U[:, : cfg.n_hat] * root)
    record("cholesky")
    try:
        factor = scipy.linalg.cho_factor(Spp)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - Wpp already screened
        raise RankDeficientRegressors("Spp is singular") from exc
    beta_z = scipy.linalg.cho_solve(factor, Sfp.T).T
    return CvaDecomposition(
        Sff=Sff,
        Sfp=Sfp,
        Spp=Spp,
        singular_values=s,
        Kp_hat=Kp_hat,
        Of_hat=Of_hat,
        X_hat=X_hat,
        beta_z=beta_z,
    )


@dataclass
class LsEstimates:
    """Least-squares system matrices from estimated states.

    A_star carries no stability guarantee.  Q_eps_hat is the sample
    covariance of the output residuals and is positive semidefinite by
    construction.
    """

    A_star: np.ndarray
    B_hat: np.ndarray
    C_hat: np.ndarray
    K_hat: np.ndarray
    Q_eps_hat: np.ndarray


def ls_system_estimates(X_hat, U0, Y0) -> LsEstimates:
    """Regress states and outputs on [states; inputs].

    [A_star B_hat] solves X1 ~ [X0; U0], C_hat solves Y0 ~ X0, the gain
    K_hat regresses X1 on the output residuals, and Q_eps_hat is the
    residual covariance.  A singular [X0; U0] Gram matrix raises
    RankDeficientRegressors.  On noise-free data the residuals vanish; the
    gain then falls back to the least-norm solution (zero).
    """
    X_hat = np.asarray(X_hat, dtype=float)
    U0 = np.atleast_2d(np.asarray(U0, dtype=float))
    Y0 = np.atleast_2d(np.asarray(Y0, dtype=float))
    n_hat = X_hat.shape[0]
    T = X_hat.shape[1] - 1
    if U0.shape[1] != T or Y0.shape[1] != T:
        raise ValueError(
            f"U0 and Y0 must have {T} columns, got {U0.shape[1]} and {Y0.shape[1]}"
        )
    X0, X1 = X_hat[:, :-1], X_hat[:, 1:]
    W = np.vstack([X0, U0])
    try:
        record("cholesky")
        factor = scipy.linalg.cho_factor(W @ W.T)
    except np.linalg.LinAlgError as exc:
        raise RankDeficientRegressors("[X0; U0] Gram matrix is singular") from exc
    AB = scipy.linalg.cho_solve(factor, W @ X1.T).T
    A_star, B_hat = AB[:, :n_hat], AB[:, n_hat:]

    try:
        record("cholesky")
        factor_x = scipy.linalg.cho_factor(X0 @ X0.T)
    except np.linalg.LinAlgError as exc:
        raise RankDeficientRegressors("X0 Gram matrix is singular") from exc
    C_hat = scipy.linalg.cho_solve(factor_x, X0 @ Y0.T).T

    E = Y0 - C_hat @ X0
    gram_e = E @ E.T
    try:
        record("cholesky")
        factor_e = scipy.linalg.cho_factor(gram_e)
        K_hat = scipy.linalg.cho_solve(factor_e, E @ X1.T).T
    except np.linalg.LinAlgError:
        record("lu")
        K_hat = np.linalg.lstsq(gram_e, E @ X1.T, rcond=None)[0].T
    Q_eps_hat = gram_e / T
    return LsEstimates(
        A_star=A_star,
        B_hat=B_hat,
        C_hat=C_hat,
        K_hat=K_hat,
        Q_eps_hat=(Q_eps_hat + Q_eps_hat.T) / 2.0,
    )
