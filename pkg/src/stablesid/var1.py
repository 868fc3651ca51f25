"""VAR(1) simulation and transition-matrix estimators.

A VAR(1) process follows u[t+1] = A_u @ u[t] + v[t] with iid zero-mean
innovations.  Alongside the plain least-squares estimator, this module
implements the correlation-weighted family

    F_P = P^{1/2} R P^{-1/2},    R = S11^{-1/2} S10 S00^{-1/2},

built from lagged sample covariances.  Every estimator in the family shares
the spectrum of the correlation matrix R, whose largest singular value is
below one for any genuine trajectory (Cauchy-Schwarz), so the estimate is
stable by construction.  Setting P = S11 collapses the product to
S10 S00^{-1/2} S11^{-1/2}, the form used by the identification pipeline.

Time series are arrays of shape (m, N): variables down the rows, samples
along the columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg
from .exceptions import InsufficientSamples, NotPositiveDefinite, UnstableModel
from .instrumentation import record

#: steps discarded before the returned window when init="zero"
ZERO_INIT_BURN_IN = 1000


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class Var1Model:
    """Stable VAR(1) input law with transition A_u and innovation covariance Q_v."""

    A_u: np.ndarray
    Q_v: np.ndarray

    def __post_init__(self):
        A_u = linalg._as_square(self.A_u, "A_u")
        Q_v = linalg._as_square(self.Q_v, "Q_v")
        if Q_v.shape != A_u.shape:
            raise ValueError(f"Q_v must match A_u, got {Q_v.shape} vs {A_u.shape}")
        object.__setattr__(self, "A_u", A_u)
        object.__setattr__(self, "Q_v", Q_v)
        rho = linalg.spectral_radius(A_u)
        if rho >= 1.0:
            raise UnstableModel(f"A_u has spectral radius {rho:.6f} >= 1")
        # raises NotPositiveDefinite on a degenerate Q_v
        linalg.sym_sqrt(Q_v)

    @property
    def m(self) -> int:
        return self.A_u.shape[0]

    def stationary_covariance(self) -> np.ndarray:
        """Solution of Pi = A_u Pi A_u' + Q_v."""
        return linalg.solve_dlyap(self.A_u, self.Q_v)


def _draw_innovations(rng, chol, count, distribution):
    m = chol.shape[0]
    if distribution == "gaussian":
        z = rng.standard_normal((m, count))
    elif distribution == "uniform":
        # uniform on [-sqrt(3), sqrt(3)] has unit variance
        z = rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), size=(m, count))
    else:
        raise ValueError(f"unknown innovation distribution {distribution!r}")
    return chol @ z


def simulate_var1(
    model: Var1Model,
    length: int,
    seed,
    init: str = "stationary",
    innovations: str = "gaussian",
    return_noise: bool = False,
):
    """Simulate u[0..length-1] from a VAR(1) model.

    With ``init="stationary"`` the first sample is drawn from the stationary
    law N(0, Pi_u); with ``init="zero"`` the recursion starts at zero and a
    burn-in of ``ZERO_INIT_BURN_IN`` steps is discarded.  The recursion
    u[t+1] = A_u u[t] + v[t] holds exactly (bitwise) for the drawn noise,
    and a fixed seed reproduces the series bit for bit.

    Returns the (m, length) series, or ``(series, noise)`` with the
    (m, length-1) innovation draws when ``return_noise`` is set.
    """
    if length < 2:
        raise ValueError("length must be at least 2")
    rng = _rng(seed)
    m = model.m
    chol_v = np.linalg.cholesky(model.Q_v)

    if init == "stationary":
        pi_u = model.stationary_covariance()
        u0 = np.linalg.cholesky(pi_u) @ rng.standard_normal(m)
        burn = 0
    elif init == "zero":
        u0 = np.zeros(m)
        burn = ZERO_INIT_BURN_IN
    else:
        raise ValueError(f"unknown init {init!r}")

    total = burn + length
    V = _draw_innovations(rng, chol_v, total - 1, innovations)
    U = np.empty((m, total))
    U[:, 0] = u0
    for t in range(total - 1):
        U[:, t + 1] = model.A_u @ U[:, t] + V[:, t]
    U = U[:, burn:]
    if return_noise:
        return U, V[:, burn:]
    return U


@dataclass(frozen=True)
class LagCovTriple:
    """Lag-0/lag-1 sample covariances of one trajectory slice.

    S00 and S11 are the Gram matrices of the slice without its last and
    first column respectively, S10 the cross term, all scaled by 1/T.
    Built from a single trajectory so the Cauchy-Schwarz bound on the
    correlation matrix applies.
    """

    S00: np.ndarray
    S11: np.ndarray
    S10: np.ndarray
    sample_count: int


def lag_covariances(series, start: int = 0, span: int | None = None) -> LagCovTriple:
    """Lagged sample covariances over series columns start .. start+span.

    The window holds span+1 samples; covariances are normalized by span.
    Raises InsufficientSamples when the series is shorter than the window.
    """
    series = np.asarray(series, dtype=float)
    if series.ndim == 1:
        series = series[None, :]
    n_samples = series.shape[1]
    if span is None:
        span = n_samples - start - 1
    if start < 0 or span < 1:
        raise ValueError("start must be >= 0 and span >= 1")
    if n_samples < start + span + 1:
        raise InsufficientSamples(
            f"need {start + span + 1} samples, series has {n_samples}"
        )
    Z = series[:, start : start + span + 1]
    Z0 = Z[:, :-1]
    Z1 = Z[:, 1:]
    S00 = Z0 @ Z0.T / span
    S11 = Z1 @ Z1.T / span
    S10 = Z1 @ Z0.T / span
    return LagCovTriple(S00=S00, S11=S11, S10=S10, sample_count=span)


def ls_estimate(cov: LagCovTriple) -> np.ndarray:
    """Least-squares transition estimate S10 @ S00^{-1}.  Not stability-guaranteed."""
    try:
        record("cholesky")
        factor = scipy.linalg.cho_factor((cov.S00 + cov.S00.T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("S00 is singular") from exc
    return scipy.linalg.cho_solve(factor, cov.S10.T).T


def cs_estimate(cov: LagCovTriple, return_sigma: bool = False):
    """Correlation-weighted stable transition estimate S10 S00^{-1/2} S11^{-1/2}.

    Spectral radius is below one whenever the correlation matrix
    R = S11^{-1/2} S10 S00^{-1/2} has largest singular value below one,
    which holds for trajectory-derived covariances.  With ``return_sigma``
    the largest singular value of R is returned alongside the estimate.
    """
    W0 = linalg.sym_inv_sqrt(cov.S00)
    W1 = linalg.sym_inv_sqrt(cov.S11)
    est = cov.S10 @ W0 @ W1
    if return_sigma:
        sigma = linalg.largest_singular_value(W1 @ cov.S10 @ W0)
        return est, sigma
    return est


def correlation_matrix(cov: LagCovTriple) -> np.ndarray:
    """The correlation matrix R = S11^{-1/2} S10 S00^{-1/2}."""
    return linalg.sym_inv_sqrt(cov.S11) @ cov.S10 @ linalg.sym_inv_sqrt(cov.S00)


def cs_estimate_general(cov: LagCovTriple, P) -> np.ndarray:
    """Weighted stable estimate P^{1/2} R P^{-1/2} for positive definite P.

    Similar to R for every valid P, so the whole family shares one spectrum;
    P = S11 reproduces :func:`cs_estimate` exactly.
    """
    R = correlation_matrix(cov)
    return linalg.sym_sqrt(P) @ R @ linalg.sym_inv_sqrt(P)
