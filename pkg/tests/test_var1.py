import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablesid import (
    LagCovTriple,
    Var1Model,
    cs_estimate,
    cs_estimate_general,
    lag_covariances,
    linalg,
    ls_estimate,
    simulate_var1,
)
from stablesid.exceptions import (
    InsufficientSamples,
    NotPositiveDefinite,
    UnstableModel,
)
from stablesid.var1 import correlation_matrix

from conftest import random_spd, random_stable

PAPER_AU = np.array([[0.9, 0.2], [-0.2, 0.9]])
PAPER_QV = np.array([[1.0, 0.5], [0.5, 2.0]])


def paper_input_model():
    return Var1Model(A_u=PAPER_AU, Q_v=PAPER_QV)


class TestVar1Model:
    def test_rejects_unstable(self):
        with pytest.raises(UnstableModel):
            Var1Model(A_u=np.array([[1.01]]), Q_v=np.array([[1.0]]))

    def test_rejects_degenerate_covariance(self):
        with pytest.raises(NotPositiveDefinite):
            Var1Model(A_u=np.array([[0.5]]), Q_v=np.array([[0.0]]))


class TestSimulate:
    def test_white_when_transition_zero(self):
        model = Var1Model(A_u=np.zeros((2, 2)), Q_v=np.eye(2))
        U, V = simulate_var1(model, 50, seed=0, return_noise=True)
        np.testing.assert_array_equal(U[:, 1:], V)

    def test_recursion_exact(self):
        model = paper_input_model()
        U, V = simulate_var1(model, 200, seed=1, return_noise=True)
        for t in range(199):
            np.testing.assert_array_equal(U[:, t + 1], model.A_u @ U[:, t] + V[:, t])

    def test_determinism(self):
        model = paper_input_model()
        a = simulate_var1(model, 100, seed=42)
        b = simulate_var1(model, 100, seed=42)
        np.testing.assert_array_equal(a, b)

    def test_zero_init_burn_in(self):
        model = paper_input_model()
        U = simulate_var1(model, 500, seed=3, init="zero")
        assert U.shape == (2, 500)
        # after burn-in the series should not sit at the origin
        assert np.abs(U[:, 0]).max() > 1e-3

    def test_uniform_innovations(self):
        model = paper_input_model()
        U = simulate_var1(model, 2000, seed=4, innovations="uniform")
        assert np.isfinite(U).all()

    def test_length_validation(self):
        with pytest.raises(ValueError):
            simulate_var1(paper_input_model(), 1, seed=0)

    def test_stationary_covariance_oracle(self):
        # Lyapunov oracle at large sample size, matching the benchmark law
        model = paper_input_model()
        U = simulate_var1(model, 10**6 + 1, seed=5)
        sample = U @ U.T / U.shape[1]
        pi_u = linalg.solve_dlyap(PAPER_AU, PAPER_QV)
        assert np.linalg.norm(sample - pi_u) <= 0.02 * np.linalg.norm(pi_u)


class TestLagCovariances:
    def test_hand_example(self):
        # series 1,2,3: S00 = (1+4)/2, S11 = (4+9)/2, S10 = (2+6)/2
        cov = lag_covariances(np.array([[1.0, 2.0, 3.0]]))
        assert cov.S00[0, 0] == pytest.approx(2.5)
        assert cov.S11[0, 0] == pytest.approx(6.5)
        assert cov.S10[0, 0] == pytest.approx(4.0)
        assert cov.sample_count == 2

    def test_zero_series_gives_zero_then_errors_downstream(self):
        cov = lag_covariances(np.zeros((2, 10)))
        assert not cov.S00.any() and not cov.S11.any() and not cov.S10.any()
        with pytest.raises(NotPositiveDefinite):
            cs_estimate(cov)

    def test_window_selection(self):
        series = np.arange(10.0)[None, :]
        cov = lag_covariances(series, start=2, span=3)
        window = series[:, 2:6]
        np.testing.assert_allclose(cov.S00, window[:, :-1] @ window[:, :-1].T / 3)

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientSamples):
            lag_covariances(np.ones((1, 5)), start=3, span=3)

    def test_stationary_match(self):
        model = paper_input_model()
        U = simulate_var1(model, 200_001, seed=6)
        cov = lag_covariances(U)
        pi_u = model.stationary_covariance()
        assert np.linalg.norm(cov.S00 - pi_u) <= 0.03 * np.linalg.norm(pi_u)
        assert np.linalg.norm(cov.S11 - pi_u) <= 0.03 * np.linalg.norm(pi_u)


class TestEstimators:
    def test_ls_zero_cross(self):
        cov = LagCovTriple(S00=np.eye(2), S11=np.eye(2), S10=np.zeros((2, 2)), sample_count=10)
        np.testing.assert_allclose(ls_estimate(cov), np.zeros((2, 2)))

    def test_ls_hand_example_unstable(self):
        cov = lag_covariances(np.array([[1.0, 2.0, 3.0]]))
        assert ls_estimate(cov)[0, 0] == pytest.approx(1.6)

    def test_cs_hand_example(self):
        cov = lag_covariances(np.array([[1.0, 2.0, 3.0]]))
        expected = 4.0 / np.sqrt(2.5 * 6.5)
        assert cs_estimate(cov)[0, 0] == pytest.approx(expected)
        assert expected < 1.0

    def test_ls_error_shrinks_with_samples(self):
        model = paper_input_model()
        errs = []
        for Tbar in (300, 3_000, 30_000):
            U = simulate_var1(model, Tbar + 1, seed=7)
            err = np.linalg.norm(ls_estimate(lag_covariances(U)) - PAPER_AU)
            errs.append(err)
        assert errs[2] < errs[1] < errs[0]

    def test_cs_consistency_at_large_T(self):
        rng = np.random.default_rng(8)
        model = Var1Model(A_u=random_stable(rng, 3, rho=0.7), Q_v=random_spd(rng, 3))
        U = simulate_var1(model, 100_001, seed=9)
        est = cs_estimate(lag_covariances(U))
        assert linalg.spectral_radius(est) < 1.0
        assert np.linalg.norm(est - model.A_u) <= 0.05

    def test_cs_sigma_bound(self):
        model = paper_input_model()
        U = simulate_var1(model, 500, seed=10)
        cov = lag_covariances(U)
        _, sigma = cs_estimate(cov, return_sigma=True)
        assert 0.0 < sigma < 1.0
        assert linalg.largest_singular_value(correlation_matrix(cov)) == pytest.approx(sigma)


class TestWeightedFamily:
    def test_weight_equal_to_s11_recovers_plain_estimate(self):
        model = paper_input_model()
        U = simulate_var1(model, 400, seed=11)
        cov = lag_covariances(U)
        np.testing.assert_allclose(
            cs_estimate_general(cov, cov.S11), cs_estimate(cov), atol=1e-12
        )

    def test_identity_weight_returns_correlation_matrix(self):
        model = paper_input_model()
        U = simulate_var1(model, 400, seed=12)
        cov = lag_covariances(U)
        np.testing.assert_allclose(
            cs_estimate_general(cov, np.eye(2)), correlation_matrix(cov), atol=1e-12
        )

    def test_spectrum_independent_of_weight(self):
        rng = np.random.default_rng(13)
        model = paper_input_model()
        U = simulate_var1(model, 600, seed=14)
        cov = lag_covariances(U)
        base = np.sort_complex(np.linalg.eigvals(cs_estimate_general(cov, np.eye(2))))
        for _ in range(5):
            P = random_spd(rng, 2, spread=5.0)
            lam = np.sort_complex(np.linalg.eigvals(cs_estimate_general(cov, P)))
            np.testing.assert_allclose(lam, base, atol=1e-10)


class TestStabilityGuarantee:
    @settings(max_examples=200, deadline=None)
    @given(
        dim=st.integers(1, 4),
        model_seed=st.integers(0, 2**31 - 1),
        path_seed=st.integers(0, 2**31 - 1),
        length=st.integers(30, 400),
        radius=st.floats(0.0, 0.995),
    )
    def test_always_stable(self, dim, model_seed, path_seed, length, radius):
        rng = np.random.default_rng(model_seed)
        A_u = random_stable(rng, dim, rho=radius) if radius > 0 else np.zeros((dim, dim))
        model = Var1Model(A_u=A_u, Q_v=random_spd(rng, dim))
        U = simulate_var1(model, length, seed=path_seed)
        cov = lag_covariances(U)
        est, sigma = cs_estimate(cov, return_sigma=True)
        assert sigma < 1.0
        assert linalg.spectral_radius(est) < 1.0

    def test_empirical_consistency_sweep(self):
        # median error over 200 seeded runs falls as the series grows
        model = paper_input_model()
        medians = []
        for Tbar in (1_000, 10_000, 100_000):
            errs = sorted(
                np.linalg.norm(
                    cs_estimate(lag_covariances(simulate_var1(model, Tbar + 1, seed=[15, Tbar, r])))
                    - PAPER_AU
                )
                for r in range(200)
            )
            medians.append(errs[(len(errs) - 1) // 2])
        assert medians[0] > medians[1] > medians[2]
