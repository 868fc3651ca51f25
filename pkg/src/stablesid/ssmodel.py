"""Innovations-form input-output state-space models.

The model is

    x[t+1] = A x[t] + B u[t] + K e[t]
    y[t]   = C x[t] + e[t]

with measured input u (itself VAR(1)), latent state x, and white innovations
e of covariance Q_eps.  This module holds the model and dataset containers,
the standing-assumption checker, trajectory simulation, the two benchmark
system builders, and the exact state transform that turns the input-driven
state into a plain VAR(1), which the tests use as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import docio, linalg
from .exceptions import UnstableModel
from .var1 import Var1Model, _draw_innovations, _rng, simulate_var1


@dataclass(frozen=True)
class StateSpaceModel:
    """System matrices (A, B, C, K) and innovation covariance Q_eps."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    K: np.ndarray
    Q_eps: np.ndarray

    def __post_init__(self):
        A = linalg._as_square(self.A, "A")
        n = A.shape[0]
        B = linalg._as_matrix(self.B, "B")
        C = linalg._as_matrix(self.C, "C")
        K = linalg._as_matrix(self.K, "K")
        Q = linalg._as_square(self.Q_eps, "Q_eps")
        if B.shape[0] != n:
            raise ValueError(f"B must have {n} rows, got {B.shape}")
        if C.shape[1] != n:
            raise ValueError(f"C must have {n} columns, got {C.shape}")
        d = C.shape[0]
        if K.shape != (n, d):
            raise ValueError(f"K must be {n}x{d}, got {K.shape}")
        if Q.shape != (d, d):
            raise ValueError(f"Q_eps must be {d}x{d}, got {Q.shape}")
        for name, value in (("A", A), ("B", B), ("C", C), ("K", K), ("Q_eps", Q)):
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def d(self) -> int:
        return self.C.shape[0]


@dataclass
class Dataset:
    """Aligned input/output series, plus optional simulation internals.

    U is (m, Tbar+1) and Y is (d, Tbar+1).  Simulated datasets carry the
    true states and the noise draws so residual identities can be checked
    exactly; datasets read from disk leave them as None.
    """

    U: np.ndarray
    Y: np.ndarray
    X_true: np.ndarray | None = None
    Eps: np.ndarray | None = None
    V: np.ndarray | None = None
    seed_info: dict = field(default_factory=dict)

    def __post_init__(self):
        # contiguous storage keeps identical datasets bitwise reproducible
        # through BLAS regardless of how the arrays were produced
        self.U = np.ascontiguousarray(np.atleast_2d(np.asarray(self.U, dtype=float)))
        self.Y = np.ascontiguousarray(np.atleast_2d(np.asarray(self.Y, dtype=float)))
        if self.U.shape[1] != self.Y.shape[1]:
            raise ValueError(
                f"U and Y must have equal length, got {self.U.shape[1]} and {self.Y.shape[1]}"
            )
        if not (np.isfinite(self.U).all() and np.isfinite(self.Y).all()):
            raise ValueError("dataset contains non-finite entries")

    @property
    def Tbar(self) -> int:
        return self.U.shape[1] - 1

    @property
    def m(self) -> int:
        return self.U.shape[0]

    @property
    def d(self) -> int:
        return self.Y.shape[0]


@dataclass(frozen=True)
class MarkovState:
    """Transformed states xi[t] = x[t] - M u[t] and their implied noise law."""

    M: np.ndarray
    Xi: np.ndarray
    Q_w: np.ndarray


@dataclass(frozen=True)
class AssumptionReport:
    """Numerical check of the standing assumptions, with margins."""

    rho_A: float
    rho_A_bar: float
    rho_Au: float
    observability_rank: int
    reachability_rank: int
    order: int
    spectral_gap: float

    @property
    def stable(self) -> bool:
        return self.rho_A < 1.0

    @property
    def minimum_phase(self) -> bool:
        return self.rho_A_bar < 1.0

    @property
    def input_stable(self) -> bool:
        return self.rho_Au < 1.0

    @property
    def observable(self) -> bool:
        return self.observability_rank == self.order

    @property
    def reachable(self) -> bool:
        return self.reachability_rank == self.order

    @property
    def spectra_disjoint(self) -> bool:
        return self.spectral_gap >= linalg.EIG_SEPARATION_TOL

    @property
    def all_pass(self) -> bool:
        return (
            self.stable
            and self.minimum_phase
            and self.input_stable
            and self.observable
            and self.reachable
            and self.spectra_disjoint
        )


def check_assumptions(model: StateSpaceModel, input_model: Var1Model) -> AssumptionReport:
    """Report stability, minimum phase, observability, reachability, spectra.

    Purely diagnostic: never raises on a failed assumption.  Rank checks use
    the numerical rank of the stacked observability matrix [C; CA; ...] and
    reachability matrix [[K B], A [K B], ...].
    """
    if model.m != input_model.m:
        raise ValueError(
            f"input dimension mismatch: model has m={model.m}, input law m={input_model.m}"
        )
    n = model.n
    rho_A = linalg.spectral_radius(model.A)
    rho_A_bar = linalg.spectral_radius(model.A - model.K @ model.C)
    rho_Au = linalg.spectral_radius(input_model.A_u)

    obs = np.empty((n * model.d, n))
    rows = model.C.copy()
    for k in range(n):
        obs[k * model.d : (k + 1) * model.d] = rows
        rows = rows @ model.A
    obs_rank = int(np.linalg.matrix_rank(obs))

    kb = np.hstack([model.K, model.B])
    reach = np.empty((n, n * kb.shape[1]))
    cols = kb.copy()
    for k in range(n):
        reach[:, k * kb.shape[1] : (k + 1) * kb.shape[1]] = cols
        cols = model.A @ cols
    reach_rank = int(np.linalg.matrix_rank(reach))

    gap = float(
        np.abs(
            linalg.eigenvalues(model.A)[:, None]
            - linalg.eigenvalues(input_model.A_u)[None, :]
        ).min()
    )
    return AssumptionReport(
        rho_A=rho_A,
        rho_A_bar=rho_A_bar,
        rho_Au=rho_Au,
        observability_rank=obs_rank,
        reachability_rank=reach_rank,
        order=n,
        spectral_gap=gap,
    )


def stationary_state_covariance(model: StateSpaceModel, input_model: Var1Model) -> np.ndarray:
    """Stationary covariance of x under the joint [x; u] dynamics.

    The stacked process [x; u] is itself linear with white driving noise
    [K e; v], so its covariance solves one discrete Lyapunov equation; the
    top-left block is the state covariance including the input coupling.
    """
    n, m = model.n, model.m
    F = np.zeros((n + m, n + m))
    F[:n, :n] = model.A
    F[:n, n:] = model.B
    F[n:, n:] = input_model.A_u
    Q = np.zeros((n + m, n + m))
    Q[:n, :n] = model.K @ model.Q_eps @ model.K.T
    Q[n:, n:] = input_model.Q_v
    P = linalg.solve_dlyap(F, Q)
    return P[:n, :n]


def simulate_ss(
    model: StateSpaceModel,
    inputs,
    seed,
    init: str = "stationary",
    innovations: str = "gaussian",
    input_model: Var1Model | None = None,
) -> Dataset:
    """Run the state recursion over a given input series.

    ``innovations="none"`` forces e = 0 (diagnostic mode for exact
    convolution checks).  Stationary initialization draws x[0] from
    N(0, Pi_x) with Pi_x from the joint Lyapunov solution, which needs the
    input law; with ``init="zero"`` the state starts at the origin and no
    input model is required.  A fixed seed reproduces the dataset bitwise.
    """
    U = np.atleast_2d(np.asarray(inputs, dtype=float))
    if U.shape[0] != model.m:
        raise ValueError(f"inputs must have {model.m} rows, got {U.shape[0]}")
    n, d = model.n, model.d
    length = U.shape[1]
    rho = linalg.spectral_radius(model.A)
    if rho >= 1.0:
        raise UnstableModel(f"A has spectral radius {rho:.6f} >= 1")

    rng = _rng(seed)
    if init == "stationary":
        if input_model is None:
            raise ValueError("stationary init requires the input law")
        pi_x = stationary_state_covariance(model, input_model)
        x0 = np.linalg.cholesky(pi_x + 1e-15 * np.eye(n)) @ rng.standard_normal(n)
    elif init == "zero":
        x0 = np.zeros(n)
    else:
        raise ValueError(f"unknown init {init!r}")

    if innovations == "none":
        Eps = np.zeros((d, length))
    else:
        Eps = _draw_innovations(rng, np.linalg.cholesky(model.Q_eps), length, innovations)

    X = np.empty((n, length))
    Y = np.empty((d, length))
    X[:, 0] = x0
    for t in range(length):
        Y[:, t] = model.C @ X[:, t] + Eps[:, t]
        if t < length - 1:
            X[:, t + 1] = model.A @ X[:, t] + model.B @ U[:, t] + model.K @ Eps[:, t]
    return Dataset(U=U, Y=Y, X_true=X, Eps=Eps)


def simulate_experiment(
    model: StateSpaceModel,
    input_model: Var1Model,
    Tbar: int,
    seed,
    init: str = "stationary",
) -> Dataset:
    """Draw one input realization and one output realization from a shared seed.

    Input and output noise come from independent spawned substreams, so the
    residual identity of the transformed state can be checked exactly from
    the stored draws.
    """
    if isinstance(seed, np.random.SeedSequence):
        root = seed
    else:
        root = np.random.SeedSequence(seed)
    input_seed, output_seed = root.spawn(2)
    U, V = simulate_var1(
        input_model, Tbar + 1, np.random.default_rng(input_seed), init=init,
        return_noise=True,
    )
    data = simulate_ss(
        model, U, np.random.default_rng(output_seed), init=init,
        input_model=input_model,
    )
    data.V = V
    data.seed_info = {"entropy": list(map(int, np.atleast_1d(root.entropy)))}
    return data


def markov_transform(
    model: StateSpaceModel, input_model: Var1Model, data: Dataset
) -> MarkovState:
    """Exact transformed states xi[t] = x[t] - M u[t] from true states.

    M solves A M - M A_u + B = 0, which removes the input drive: the
    transformed state obeys xi[t+1] = A xi[t] + (K e[t] - M v[t]), a plain
    VAR(1) with white noise of covariance Q_w = K Q_eps K' + M Q_v M'.
    Raises CommonEigenvalues when A and A_u share an eigenvalue.
    """
    if data.X_true is None:
        raise ValueError("markov_transform needs a dataset with true states")
    M = linalg.solve_sylvester(model.A, input_model.A_u, model.B)
    Xi = data.X_true - M @ data.U
    Q_w = model.K @ model.Q_eps @ model.K.T + M @ input_model.Q_v @ M.T
    return MarkovState(M=M, Xi=Xi, Q_w=(Q_w + Q_w.T) / 2.0)


def build_lowdim_example() -> tuple[StateSpaceModel, Var1Model]:
    """Five-state, two-input, one-output benchmark system.

    Poles sit at -0.995 and two conjugate pairs of magnitude 0.950 and
    0.922; the observer dynamics A - KC stay well inside the unit circle.
    """
    A = np.array(
        [
            [0.7, 0.642, 0.0, 0.0, 0.0],
            [-0.642, 0.7, 0.0, 0.0, 0.0],
            [0.0, 0.0, -0.5, 0.775, 0.0],
            [0.0, 0.0, -0.775, -0.5, 0.0],
            [0.0, 0.0, 0.0, 0.0, -0.995],
        ]
    )
    B = np.full((5, 2), 0.2)
    C = np.full((1, 5), 0.3)
    K = np.array([[0.5, 0.5, -0.3, -0.3, -0.9]]).T
    Q_eps = np.array([[1.0]])
    model = StateSpaceModel(A=A, B=B, C=C, K=K, Q_eps=Q_eps)
    input_model = Var1Model(
        A_u=np.array([[0.9, 0.2], [-0.2, 0.9]]),
        Q_v=np.array([[1.0, 0.5], [0.5, 2.0]]),
    )
    return model, input_model


def _conjugate_pair_block(radius: float, angle: float) -> np.ndarray:
    re, im = radius * math.cos(angle), radius * math.sin(angle)
    return np.array([[re, im], [-im, re]])


def build_highdim_example(
    n: int, p: int, pole_radius: float = 0.9999
) -> tuple[StateSpaceModel, Var1Model]:
    """Benchmark system of even order n for large-scale runs.

    A is block diagonal: one 2x2 rotation block per conjugate pole pair,
    all pairs at ``pole_radius``, angles equally spaced over (0, pi).  B is
    all 0.2, C all 0.3, and the input law matches the low-order benchmark.
    The observer gain places the eigenvalues of A - KC at the same angles
    with magnitude 0.1^(1/p), so the p-step observer contraction is 0.1.
    """
    if n < 4 or n % 2:
        raise ValueError("n must be even and at least 4")
    if p < 1:
        raise ValueError("p must be positive")
    half = n // 2
    angles = np.pi * np.arange(1, half + 1) / (half + 1)
    A = np.zeros((n, n))
    for i, angle in enumerate(angles):
        A[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = _conjugate_pair_block(
            pole_radius, angle
        )
    B = np.full((n, 2), 0.2)
    C = np.full((1, n), 0.3)
    observer_radius = 0.1 ** (1.0 / p)
    targets = np.concatenate(
        [observer_radius * np.exp(1j * angles), observer_radius * np.exp(-1j * angles)]
    )
    K = linalg.place_observer_poles(A, C, targets)
    model = StateSpaceModel(A=A, B=B, C=C, K=K, Q_eps=np.array([[1.0]]))
    _, input_model = build_lowdim_example()
    return model, input_model


# ---------------------------------------------------------------------------
# model documents
# ---------------------------------------------------------------------------


def model_to_document(
    model: StateSpaceModel, input_model: Var1Model | None = None
) -> dict:
    doc = {
        "kind": "state-space-model",
        "version": 1,
        "n": model.n,
        "m": model.m,
        "d": model.d,
        "A": model.A,
        "B": model.B,
        "C": model.C,
        "K": model.K,
        "Q_eps": model.Q_eps,
    }
    if input_model is not None:
        doc["input_model"] = {"A_u": input_model.A_u, "Q_v": input_model.Q_v}
    return doc


def model_from_document(doc: dict) -> tuple[StateSpaceModel, Var1Model | None]:
    if doc.get("kind") != "state-space-model":
        raise ValueError(f"not a model document: kind={doc.get('kind')!r}")
    model = StateSpaceModel(
        A=np.array(doc["A"], dtype=float),
        B=np.array(doc["B"], dtype=float),
        C=np.array(doc["C"], dtype=float),
        K=np.array(doc["K"], dtype=float),
        Q_eps=np.array(doc["Q_eps"], dtype=float),
    )
    input_model = None
    if "input_model" in doc:
        input_model = Var1Model(
            A_u=np.array(doc["input_model"]["A_u"], dtype=float),
            Q_v=np.array(doc["input_model"]["Q_v"], dtype=float),
        )
    return model, input_model


def save_model(path, model: StateSpaceModel, input_model: Var1Model | None = None) -> None:
    """Write a model document; floats round-trip bit-exactly."""
    docio.write(path, model_to_document(model, input_model))


def load_model(path) -> tuple[StateSpaceModel, Var1Model | None]:
    return model_from_document(docio.read(path))
