import numpy as np
import pytest

from stablesid import linalg
from stablesid.exceptions import (
    CommonEigenvalues,
    NotObservable,
    NotPositiveDefinite,
    UnstableMatrix,
    UnsupportedDimension,
)

from conftest import random_spd, random_stable


class TestSymSqrt:
    def test_identity(self):
        np.testing.assert_allclose(linalg.sym_sqrt(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        np.testing.assert_allclose(
            linalg.sym_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0])
        )

    def test_compose_oracle(self):
        # oracle: multiply the root back together, no eigensolver involved
        rng = np.random.default_rng(1)
        S = random_spd(rng, 5)
        R = linalg.sym_sqrt(S)
        np.testing.assert_allclose(R, R.T)
        assert np.linalg.norm(R @ R - S) <= 1e-10 * np.linalg.norm(S)

    def test_rejects_semidefinite(self):
        with pytest.raises(NotPositiveDefinite):
            linalg.sym_sqrt(np.diag([1.0, 0.0]))
        with pytest.raises(NotPositiveDefinite):
            linalg.sym_sqrt(np.diag([1.0, -0.5]))

    def test_rejects_asymmetric(self):
        with pytest.raises(NotPositiveDefinite):
            linalg.sym_sqrt(np.array([[1.0, 0.5], [0.1, 1.0]]))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            linalg.sym_sqrt(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestSymInvSqrt:
    def test_identity(self):
        np.testing.assert_allclose(linalg.sym_inv_sqrt(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        np.testing.assert_allclose(
            linalg.sym_inv_sqrt(np.diag([4.0, 9.0])), np.diag([0.5, 1.0 / 3.0])
        )

    def test_sandwich_oracle(self):
        rng = np.random.default_rng(2)
        S = random_spd(rng, 6)
        R = linalg.sym_inv_sqrt(S)
        assert np.linalg.norm(R @ S @ R - np.eye(6)) <= 1e-9

    def test_mutual_consistency_with_sqrt(self):
        rng = np.random.default_rng(3)
        for k in range(20):
            S = random_spd(rng, 4, spread=10.0)
            prod = linalg.sym_sqrt(S) @ linalg.sym_inv_sqrt(S)
            assert np.linalg.norm(prod - np.eye(4)) <= 1e-9


def kron_sylvester_oracle(A, A_u, B):
    """Independent route: vectorize A M - M A_u = -B via Kronecker products."""
    n, m = B.shape
    G = np.kron(np.eye(m), A) - np.kron(A_u.T, np.eye(n))
    vec_m = np.linalg.solve(G, -B.flatten(order="F"))
    return vec_m.reshape((n, m), order="F")


class TestSolveSylvester:
    def test_scalar_closed_form(self):
        M = linalg.solve_sylvester(np.array([[0.0]]), np.array([[0.5]]), np.array([[1.0]]))
        np.testing.assert_allclose(M, [[2.0]])

    def test_common_eigenvalues(self):
        A = 0.5 * np.eye(3)
        with pytest.raises(CommonEigenvalues):
            linalg.solve_sylvester(A, 0.5 * np.eye(2), np.ones((3, 2)))

    def test_matches_kronecker_oracle(self):
        rng = np.random.default_rng(4)
        A = random_stable(rng, 4, rho=0.8)
        A_u = random_stable(rng, 2, rho=0.95) + 1.5 * np.eye(2)
        B = rng.standard_normal((4, 2))
        M = linalg.solve_sylvester(A, A_u, B)
        expected = kron_sylvester_oracle(A, A_u, B)
        assert np.linalg.norm(M - expected) <= 1e-10 * max(np.linalg.norm(expected), 1.0)

    def test_unique_across_methods(self):
        rng = np.random.default_rng(5)
        for k in range(25):
            n, m = int(rng.integers(2, 7)), int(rng.integers(1, 5))
            A = random_stable(rng, n, rho=0.9)
            A_u = random_stable(rng, m, rho=0.9) + 2.0 * np.eye(m)
            B = rng.standard_normal((n, m))
            M = linalg.solve_sylvester(A, A_u, B)
            expected = kron_sylvester_oracle(A, A_u, B)
            scale = max(np.linalg.norm(expected), 1.0)
            assert np.linalg.norm(M - expected) <= 1e-9 * scale


class TestSolveDlyap:
    def test_zero_transition(self):
        Q = np.diag([2.0, 3.0])
        np.testing.assert_allclose(linalg.solve_dlyap(np.zeros((2, 2)), Q), Q)

    def test_scalar_geometric_series(self):
        P = linalg.solve_dlyap(np.array([[0.5]]), np.array([[1.0]]))
        np.testing.assert_allclose(P, [[4.0 / 3.0]])

    def test_series_oracle(self):
        rng = np.random.default_rng(6)
        A = random_stable(rng, 6, rho=0.8)
        Q = random_spd(rng, 6)
        P = linalg.solve_dlyap(A, Q)
        # truncate sum_k A^k Q A'^k once rho^{2K} ||Q|| is below 1e-12
        rho = linalg.spectral_radius(A)
        K = int(np.ceil(np.log(1e-12 / np.linalg.norm(Q)) / (2 * np.log(rho)))) + 1
        term = Q.copy()
        series = Q.copy()
        for _ in range(K):
            term = A @ term @ A.T
            series += term
        assert np.linalg.norm(P - series) / np.linalg.norm(Q) <= 1e-8

    def test_residual_and_positivity(self):
        rng = np.random.default_rng(7)
        A = random_stable(rng, 5, rho=0.95)
        Q = random_spd(rng, 5)
        P = linalg.solve_dlyap(A, Q)
        assert np.linalg.norm(P - A @ P @ A.T - Q) / np.linalg.norm(Q) <= 1e-8
        assert np.linalg.eigvalsh(P).min() > 0

    def test_unstable_rejected(self):
        with pytest.raises(UnstableMatrix):
            linalg.solve_dlyap(np.array([[1.0]]), np.array([[1.0]]))


class TestSpectra:
    def test_spectral_radius_diagonal(self):
        assert linalg.spectral_radius(np.diag([0.5, -0.9])) == pytest.approx(0.9)

    def test_rotation_block(self):
        theta = 0.7
        A = 0.95 * np.array(
            [[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]]
        )
        lam = np.sort_complex(linalg.eigenvalues(A))
        expected = np.sort_complex(
            np.array([0.95 * np.exp(1j * theta), 0.95 * np.exp(-1j * theta)])
        )
        np.testing.assert_allclose(lam, expected, atol=1e-12)

    def test_conjugate_pairs_present(self):
        rng = np.random.default_rng(8)
        A = rng.standard_normal((6, 6))
        lam = linalg.eigenvalues(A)
        assert lam.shape == (6,)
        np.testing.assert_allclose(
            np.sort_complex(lam), np.sort_complex(np.conj(lam)), atol=1e-8
        )

    def test_largest_singular_value_gram_oracle(self):
        rng = np.random.default_rng(9)
        A = rng.standard_normal((8, 8))
        sbar = linalg.largest_singular_value(A)
        gram = np.linalg.eigvalsh(A.T @ A).max()
        assert sbar == pytest.approx(np.sqrt(gram), rel=1e-10)

    def test_similarity_invariance_of_radius(self):
        rng = np.random.default_rng(10)
        X = rng.standard_normal((5, 5))
        P = random_spd(rng, 5)
        Ph = linalg.sym_sqrt(P)
        Pih = linalg.sym_inv_sqrt(P)
        assert linalg.spectral_radius(Ph @ X @ Pih) == pytest.approx(
            linalg.spectral_radius(X), rel=1e-9
        )


class TestPlacement:
    def test_scalar(self):
        K = linalg.place_observer_poles(
            np.array([[0.9]]), np.array([[1.0]]), [0.1]
        )
        np.testing.assert_allclose(K, [[0.8]])

    def test_zero_output_not_observable(self):
        with pytest.raises(NotObservable):
            linalg.place_observer_poles(
                np.diag([0.5, 0.6]), np.zeros((1, 2)), [0.1, 0.2]
            )

    def test_multi_output_unsupported(self):
        with pytest.raises(UnsupportedDimension):
            linalg.place_observer_poles(np.eye(2) * 0.5, np.eye(2), [0.1, 0.2])

    def test_conjugation_required(self):
        with pytest.raises(ValueError):
            linalg.place_observer_poles(
                np.diag([0.5, 0.6]), np.ones((1, 2)), [0.1 + 0.2j, 0.3]
            )

    def test_highdim_style_blocks(self):
        # rotation-block A as in the large-scale generator, n = 8, p = 18
        from stablesid import build_highdim_example

        n, p = 8, 18
        model, _ = build_highdim_example(n, p)
        mags = np.abs(np.linalg.eigvals(model.A - model.K @ model.C))
        target = 0.1 ** (1.0 / p)
        np.testing.assert_allclose(mags, target, atol=1e-4)

    def test_random_distinct_spectrum(self):
        rng = np.random.default_rng(11)
        A = random_stable(rng, 6, rho=0.9)
        C = rng.standard_normal((1, 6))
        targets = np.array(
            [0.3, -0.2, 0.5 + 0.1j, 0.5 - 0.1j, 0.1 + 0.6j, 0.1 - 0.6j]
        )
        K = linalg.place_observer_poles(A, C, targets)
        assert K.shape == (6, 1)
        assert np.isrealobj(K)
        got = np.sort_complex(np.linalg.eigvals(A - K @ C))
        np.testing.assert_allclose(got, np.sort_complex(targets), atol=1e-6)

    def test_repeated_eigenvalues_fallback(self):
        # Jordan-type A has a repeated eigenvalue yet is observable
        A = np.array([[0.5, 1.0], [0.0, 0.5]])
        C = np.array([[1.0, 0.0]])
        K = linalg.place_observer_poles(A, C, [0.1, 0.2])
        got = np.sort(np.linalg.eigvals(A - K @ C).real)
        np.testing.assert_allclose(got, [0.1, 0.2], atol=1e-9)
