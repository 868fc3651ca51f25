"""Acceptance suite.

One test per acceptance criterion, each printing a PASS or FAIL line with
the observed values (run ``pytest -s tests/test_acceptance.py`` to see the
lines for passing criteria; failures always show them).  The heavyweight
Monte Carlo records are computed once per session and shared.

Budget on one desktop core: the whole module takes on the order of ten to
twenty minutes, dominated by the order-1024 single identification.
"""

import functools
import time

import numpy as np
import pytest

from stablesid import (
    SubspaceConfig,
    build_highdim_example,
    build_lowdim_example,
    count_factorizations,
    frequency_response,
    hinf_report,
    identify,
    linalg,
    metrics,
    simulate_experiment,
    simulate_var1,
)
from stablesid.cva import build_hankel, ls_system_estimates, partial_covariances, project_out
from stablesid.harness import ExperimentConfig, run_consistency, run_lowdim, run_highdim
from stablesid.ssmodel import Dataset, StateSpaceModel
from stablesid.var1 import Var1Model, cs_estimate, lag_covariances

from conftest import random_spd, random_stable
from test_linalg import kron_sylvester_oracle


def criterion(name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException:
                _emit(f"ACCEPTANCE FAIL: {name}")
                raise
            suffix = f" ({detail})" if detail else ""
            _emit(f"ACCEPTANCE PASS: {name}{suffix}")

        return wrapper

    return decorate


def _emit(line: str) -> None:
    import conftest

    print(line, flush=True)
    conftest.ACCEPTANCE_LINES.append(line)


# ---------------------------------------------------------------------------
# shared Monte Carlo records (computed once)
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def lowdim_record():
    # the reduced-scale medians are noisy at 30 keepers; the base seed is
    # fixed so the documented reproduction is deterministic
    cfg = ExperimentConfig(
        mode="lowdim",
        Tbar_values=[320, 640],
        target_unstable_count=30,
        base_seed=555,
    )
    return run_lowdim(cfg)


@pytest.fixture(scope="module")
def consistency_record():
    cfg = ExperimentConfig(mode="consistency", repeats=200, base_seed=2024)
    return run_consistency(cfg)


@pytest.fixture(scope="module")
def highdim_record():
    cfg = ExperimentConfig(
        mode="highdim", orders=[16, 64], target_unstable_count=10, base_seed=99
    )
    return run_highdim(cfg)


def _all_rows(*records):
    for record in records:
        yield from record["rows"]


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


@criterion("stability guarantee: 10^4 randomized VAR(1) estimations all stable")
def test_stability_guarantee_var1():
    rng = np.random.default_rng(31337)
    worst = 0.0
    for k in range(10_000):
        dim = int(rng.integers(1, 5))
        radius = float(rng.uniform(0.0, 0.995))
        A_u = random_stable(rng, dim, rho=radius) if radius > 1e-3 else np.zeros((dim, dim))
        model = Var1Model(A_u=A_u, Q_v=random_spd(rng, dim))
        length = int(rng.integers(30, 400))
        dist = "gaussian" if k % 2 == 0 else "uniform"
        U = simulate_var1(model, length, seed=int(rng.integers(2**31)), innovations=dist)
        est = cs_estimate(lag_covariances(U))
        rho = linalg.spectral_radius(est)
        assert rho < 1.0, f"unstable estimate at trial {k}: rho={rho}"
        worst = max(worst, rho)
    return f"10000 runs, max rho = {worst:.6f}"


@criterion("stability guarantee: every harness repeat stable at all (n, Tbar)")
def test_stability_guarantee_harness(lowdim_record, consistency_record, highdim_record):
    count = 0
    worst_a = worst_u = 0.0
    for row in _all_rows(lowdim_record, consistency_record, highdim_record):
        assert row["failure_stage"] is None
        assert row["rho_A_hat"] < 1.0
        assert row["rho_Au_hat"] < 1.0
        worst_a = max(worst_a, row["rho_A_hat"])
        worst_u = max(worst_u, row["rho_Au_hat"])
        count += 1
    assert count >= 1000
    return f"{count} repeats, max rho(A_hat) = {worst_a:.8f}, max rho(Au_hat) = {worst_u:.6f}"


@criterion("closed-form contract: factorization counts independent of data")
def test_closed_form_contract():
    counts = []
    model, input_model = build_lowdim_example()
    for seed, Tbar, p in ((1, 320, 29), (2, 640, 33), (3, 1280, 36)):
        data = simulate_experiment(model, input_model, Tbar, seed)
        with count_factorizations() as c:
            identify(data, SubspaceConfig(f=10, p=p, n_hat=5))
        counts.append(dict(c))
    hd_model, hd_input = build_highdim_example(16, 26)
    data = simulate_experiment(hd_model, hd_input, 1020, 4)
    with count_factorizations() as c:
        identify(data, SubspaceConfig(f=26, p=26, n_hat=16))
    counts.append(dict(c))
    assert all(c == counts[0] for c in counts[1:]), counts
    total = sum(counts[0].values())
    return f"{total} factorizations per run across {len(counts)} distinct datasets/orders"


@criterion("golden model: benchmark pole sets match their design values")
def test_golden_model():
    model, _ = build_lowdim_example()
    lam = np.linalg.eigvals(model.A)
    mags = np.sort(np.abs(lam))[::-1]
    np.testing.assert_allclose(mags, [0.995, 0.95, 0.95, 0.92, 0.92], atol=5e-3)
    real = lam[np.abs(lam.imag) < 1e-12]
    assert real.size == 1
    np.testing.assert_allclose(real[0].real, -0.995, atol=5e-3)
    angles = np.sort(np.abs(np.angle(lam[np.abs(lam.imag) > 1e-12])))
    np.testing.assert_allclose(angles, [0.74, 0.74, np.pi - 1.0, np.pi - 1.0], atol=5e-3)
    observer = np.sort(np.abs(np.linalg.eigvals(model.A - model.K @ model.C)))
    np.testing.assert_allclose(observer, [0.686, 0.803, 0.803, 0.821, 0.821], atol=5e-3)
    return "pole magnitudes and angles within 5e-3"


@criterion("oracle equivalences: independent routes agree at stated tolerances")
def test_oracle_equivalences():
    rng = np.random.default_rng(7)

    # Sylvester solver vs Kronecker vectorization, 100 instances at 1e-9
    for _ in range(100):
        n, m = int(rng.integers(2, 7)), int(rng.integers(1, 4))
        A = random_stable(rng, n, rho=0.9)
        A_u = random_stable(rng, m, rho=0.9) + 2.0 * np.eye(m)
        B = rng.standard_normal((n, m))
        M = linalg.solve_sylvester(A, A_u, B)
        expected = kron_sylvester_oracle(A, A_u, B)
        assert np.linalg.norm(M - expected) <= 1e-9 * max(np.linalg.norm(expected), 1.0)

    # symmetric square root compose check at 1e-10
    for _ in range(50):
        S = random_spd(rng, int(rng.integers(2, 8)), spread=5.0)
        R = linalg.sym_sqrt(S)
        assert np.linalg.norm(R @ R - S) <= 1e-10 * np.linalg.norm(S)

    # two least-squares formulas for the transition estimate at 1e-8
    X = rng.standard_normal((4, 201))
    U0 = rng.standard_normal((2, 200))
    Y0 = rng.standard_normal((1, 200))
    ls = ls_system_estimates(X, U0, Y0)
    X0p = project_out(X[:, :-1], U0)
    X1p = project_out(X[:, 1:], U0)
    alt = X1p @ X0p.T @ np.linalg.inv(X0p @ X0p.T)
    assert np.abs(ls.A_star - alt).max() <= 1e-8

    # frequency response vs truncated impulse series at 1e-8
    A = random_stable(rng, 5, rho=0.6)
    B = rng.standard_normal((5, 2))
    C = rng.standard_normal((1, 5))
    K = rng.standard_normal((5, 1))
    k_max = int(np.ceil(np.log(1e-12) / np.log(0.6)))
    for omega in (0.0, 0.9, 2.2, np.pi):
        total = np.zeros((1, 3), dtype=complex)
        power = np.eye(5)
        for k in range(k_max):
            total += C @ power @ np.hstack([B, K]) * np.exp(-1j * (k + 1) * omega)
            power = power @ A
        total += np.array([[0.0, 0.0, 1.0]])
        assert np.abs(frequency_response(A, B, C, K, omega) - total).max() <= 1e-8

    # row-space projection vs the explicit sample-space projector at 1e-10
    Y = rng.standard_normal((3, 9))
    U = rng.standard_normal((2, 9))
    P = U.T @ np.linalg.solve(U @ U.T, U)
    assert np.abs(project_out(Y, U) - Y @ (np.eye(9) - P)).max() <= 1e-10
    return "sylvester 1e-9, sqrt 1e-10, regression 1e-8, response 1e-8, projector 1e-10"


@criterion("low-order reproduction: incidence band and error medians")
def test_lowdim_reproduction(lowdim_record):
    cells = {cell["Tbar"]: cell["aggregates"] for cell in lowdim_record["cells"]}
    incidence_320 = cells[320]["unstable_ls_incidence"]
    assert 0.02 <= incidence_320 <= 0.10, f"incidence {incidence_320:.4f}"

    reference = {320: 37.8, 640: 34.6}
    medians = {}
    for Tbar, expected in reference.items():
        med = cells[Tbar]["hard_hinf"]["median"]
        medians[Tbar] = med
        assert expected / 2.0 <= med <= expected * 2.0, f"Tbar={Tbar}: median {med:.2f}"
    assert medians[640] <= medians[320], f"medians increased: {medians}"
    return (
        f"incidence(320) = {incidence_320:.2%}, hard medians "
        f"{medians[320]:.1f} -> {medians[640]:.1f} vs reference 37.8 -> 34.6"
    )


@criterion("consistency sweep: medians fall, error rate near root-T")
def test_consistency_sweep(consistency_record):
    summary = consistency_record["summary"]
    for key in ("median_au_error", "median_eig_distance", "median_soft_hinf"):
        values = summary[key]
        assert all(a > b for a, b in zip(values, values[1:])), f"{key}: {values}"
    slope = summary["au_error_loglog_slope"]
    assert -0.7 <= slope <= -0.3, f"slope {slope}"
    return (
        f"slope = {slope:.3f}, au medians {[f'{v:.4f}' for v in summary['median_au_error']]}"
    )


@criterion("high-dimensional scaling: n = 16, 64 full pipeline on every repeat")
def test_highdim_full_pipeline(highdim_record):
    for cell in highdim_record["cells"]:
        agg = cell["aggregates"]
        assert agg["failures"] == 0
        assert agg["kept"] == cell["target"]
        assert agg["max_rho_A_hat"] < 1.0
        assert agg["max_rho_Au_hat"] < 1.0
    attempts = {c["n"]: c["aggregates"]["attempts"] for c in highdim_record["cells"]}
    return f"attempts per order: {attempts}"


@criterion("high-dimensional scaling: n = 256 single identification under 60 s")
def test_highdim_n256_time():
    model, input_model = build_highdim_example(256, 266)
    data = simulate_experiment(model, input_model, 20 * 266 + 500, seed=5)
    cfg = SubspaceConfig(f=266, p=266, n_hat=256)
    start = time.perf_counter()
    result = identify(data, cfg)
    elapsed = time.perf_counter() - start
    assert result.diagnostics["rho_A_hat"] < 1.0
    assert elapsed <= 60.0, f"{elapsed:.1f} s"
    return f"{elapsed:.1f} s, rho(A_hat) = {result.diagnostics['rho_A_hat']:.6f}"


@criterion("high-dimensional scaling: n = 1024 single identification under 15 min")
def test_highdim_n1024_time():
    model, input_model = build_highdim_example(1024, 1034)
    data = simulate_experiment(model, input_model, 20 * 1034 + 500, seed=6)
    cfg = SubspaceConfig(f=1034, p=1034, n_hat=1024)
    start = time.perf_counter()
    result = identify(data, cfg)
    elapsed = time.perf_counter() - start
    assert result.diagnostics["rho_A_hat"] < 1.0
    assert result.diagnostics["rho_Au_hat"] < 1.0
    assert elapsed <= 900.0, f"{elapsed:.1f} s"
    return f"{elapsed:.1f} s, rho(A_hat) = {result.diagnostics['rho_A_hat']:.8f}"


@criterion("basis invariance: frequency errors unchanged under similarity")
def test_basis_invariance():
    model, input_model = build_lowdim_example()
    data = simulate_experiment(model, input_model, 640, seed=8)
    result = identify(data, SubspaceConfig(f=10, p=33, n_hat=5))
    est = result.estimated_model()
    base = hinf_report(model, est, grid=1000)
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(5):
        Q1 = np.linalg.qr(rng.standard_normal((5, 5)))[0]
        Q2 = np.linalg.qr(rng.standard_normal((5, 5)))[0]
        T = Q1 @ np.diag(0.5 + rng.random(5)) @ Q2
        Ti = np.linalg.inv(T)
        moved = StateSpaceModel(
            A=T @ est.A @ Ti, B=T @ est.B, C=est.C @ Ti, K=T @ est.K, Q_eps=est.Q_eps
        )
        report = hinf_report(model, moved, grid=1000)
        dev = max(
            abs(report.hard_error - base.hard_error),
            abs(report.soft_error - base.soft_error),
        )
        worst = max(worst, dev)
        assert dev <= 1e-9, f"deviation {dev:.2e}"
    return f"max deviation {worst:.2e} over 5 random similarity transforms"
