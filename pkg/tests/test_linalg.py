"""Tests for matrix square roots, pair normalization, and companion analysis."""

import numpy as np
import pytest

from seasvecm.dgp import default_config
from seasvecm.errors import ConvergenceError
from seasvecm.linalg import (
    CompanionMatrix,
    build_companion,
    hermitian_sqrt,
    normalize_pair,
    stability_check,
)
from seasvecm.pipeline import ModelSpec
from seasvecm.priors import ParamState, PriorHyper, sample_prior_state


def eig_sqrt(h):
    """Independent principal square root via eigendecomposition."""
    vals, vecs = np.linalg.eigh(0.5 * (h + h.conj().T))
    return vecs @ np.diag(np.sqrt(vals)) @ vecs.conj().T


def zero_rank_state(n, k, gammas=()):
    """State with no cointegration: the process is a pure seasonal random walk."""
    empty = np.zeros((n, 0))
    gamma = (
        np.vstack([g.T for g in gammas]).astype(float)
        if gammas
        else np.zeros((0, n))
    )
    return ParamState(
        Sigma=np.eye(n),
        nu=1.0,
        Gamma=gamma,
        A1=empty,
        B1=empty,
        A2=empty,
        B2=empty,
        A_R=empty,
        A_I=empty,
        B_R=empty,
        B_I=empty,
    )


class TestHermitianSqrt:
    def test_identity(self):
        x = hermitian_sqrt(np.eye(3))
        assert np.allclose(x, np.eye(3), atol=1e-12)

    def test_diagonal(self):
        x = hermitian_sqrt(np.diag([4.0, 9.0]))
        assert np.allclose(x, np.diag([2.0, 3.0]), atol=1e-12)

    def test_scaled_identity(self):
        x = hermitian_sqrt(2.0 * np.eye(2))
        assert np.allclose(x, np.sqrt(2.0) * np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
    @pytest.mark.parametrize("complex_case", [False, True])
    def test_matches_eigendecomposition(self, m, complex_case):
        rng = np.random.default_rng(100 + m + int(complex_case))
        a = rng.standard_normal((m, m))
        if complex_case:
            a = a + 1j * rng.standard_normal((m, m))
        h = a @ a.conj().T + 0.1 * np.eye(m)
        x = hermitian_sqrt(h)
        assert np.linalg.norm(x @ x - h) <= 1e-10 * max(1.0, np.linalg.norm(h))
        assert np.allclose(x, eig_sqrt(h), atol=1e-8)
        # principal root: Hermitian with non-negative spectrum
        assert np.linalg.norm(x - x.conj().T) <= 1e-10
        assert np.linalg.eigvalsh(x).min() >= -1e-10

    def test_real_input_gives_real_output(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((4, 4))
        h = a @ a.T + 0.5 * np.eye(4)
        x = hermitian_sqrt(h)
        assert not np.iscomplexobj(x)

    def test_ill_conditioned_uses_fallback(self):
        # Newton iteration struggles when the condition number is extreme;
        # the eigendecomposition fallback must still deliver the residual bound.
        h = np.diag([1e-12, 1.0, 1e8])
        x = hermitian_sqrt(h)
        assert np.linalg.norm(x @ x - h) <= 1e-10 * np.linalg.norm(h)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            hermitian_sqrt(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_non_positive_definite(self):
        with pytest.raises(ValueError):
            hermitian_sqrt(np.diag([1.0, -1.0]))
        with pytest.raises(ValueError):
            hermitian_sqrt(np.zeros((2, 2)))


class TestNormalizePair:
    def test_orthonormal_b_is_fixed_point(self):
        b = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        a = np.arange(6.0).reshape(3, 2)
        alpha, beta = normalize_pair(a, b)
        assert np.allclose(beta, b, atol=1e-12)
        assert np.allclose(alpha, a, atol=1e-12)

    def test_column_scaling_moves_to_alpha(self):
        a = np.array([[1.0], [1.0]])
        b = np.array([[2.0], [0.0]])
        alpha, beta = normalize_pair(a, b)
        assert np.allclose(beta, [[1.0], [0.0]], atol=1e-12)
        assert np.allclose(alpha, [[2.0], [2.0]], atol=1e-12)

    @pytest.mark.parametrize("complex_case", [False, True])
    def test_random_pairs(self, complex_case):
        rng = np.random.default_rng(11 + int(complex_case))
        for _ in range(20):
            m, n, r = rng.integers(1, 6), rng.integers(1, 6), 0
            r = int(rng.integers(1, min(m, 4) + 1))
            b = rng.standard_normal((m, r))
            a = rng.standard_normal((n, r))
            if complex_case:
                b = b + 1j * rng.standard_normal((m, r))
                a = a + 1j * rng.standard_normal((n, r))
            alpha, beta = normalize_pair(a, b)
            assert np.allclose(beta.conj().T @ beta, np.eye(r), atol=1e-10)
            assert np.allclose(alpha @ beta.conj().T, a @ b.conj().T, atol=1e-10)

    def test_empty_rank(self):
        alpha, beta = normalize_pair(np.zeros((3, 0)), np.zeros((2, 0)))
        assert alpha.shape == (3, 0)
        assert beta.shape == (2, 0)

    def test_rejects_rank_deficient(self):
        b = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
        a = np.zeros((2, 2))
        with pytest.raises(ValueError):
            normalize_pair(a, b)

    def test_rejects_column_mismatch(self):
        with pytest.raises(ValueError):
            normalize_pair(np.zeros((2, 1)), np.zeros((3, 2)))


class TestCompanion:
    def test_pure_seasonal_walk_roots(self):
        # no cointegration at any frequency: exactly 4n roots on the unit
        # circle, n at each of +1, -1, +i, -i
        n, k = 2, 4
        spec = ModelSpec(n=n, k=k, d=4, s=0, r1=0, r2=0, r3=0)
        state = zero_rank_state(n, k)
        comp = build_companion(state, spec)
        assert comp.matrix.shape == (n * k, n * k)
        eigs = np.linalg.eigvals(comp.matrix)
        for target in (1.0, -1.0, 1j, -1j):
            close = np.abs(eigs - target) <= 1e-10
            assert close.sum() == n
        report = stability_check(comp, spec)
        assert report.is_admissible
        assert report.unit_counts == {"zero": n, "biannual": n, "annual": n}
        assert report.max_other <= 1e-10

    def test_pure_seasonal_walk_with_lags(self):
        # short-run dynamics move the non-unit roots but keep all 4n unit roots
        n = 2
        gamma1 = np.array([[0.3, 0.0], [0.1, 0.2]])
        spec = ModelSpec(n=n, k=5, d=4, s=0, r1=0, r2=0, r3=0)
        state = zero_rank_state(n, 5, gammas=(gamma1,))
        eigs = np.linalg.eigvals(build_companion(state, spec).matrix)
        for target in (1.0, -1.0, 1j, -1j):
            assert (np.abs(eigs - target) <= 1e-10).sum() == n

    def test_full_rank_zero_frequency(self):
        # Pi_1 = -I removes every root at +1 while keeping n roots at each
        # of -1, +i, -i; the remaining eigenvalues are zero.
        n = 2
        spec = ModelSpec(n=n, k=4, d=4, s=0, r1=n, r2=0, r3=0)
        state = zero_rank_state(n, 4)
        state.A1 = -np.eye(n)
        state.B1 = np.eye(n)
        eigs = np.linalg.eigvals(build_companion(state, spec).matrix)
        assert (np.abs(eigs - 1.0) <= 1e-10).sum() == 0
        for target in (-1.0, 1j, -1j):
            assert (np.abs(eigs - target) <= 1e-10).sum() == n
        report = stability_check(build_companion(state, spec), spec)
        assert report.is_admissible
        assert report.unit_counts == {"zero": 0, "biannual": n, "annual": n}

    def test_benchmark_process_is_admissible(self):
        config = default_config()
        report = stability_check(
            build_companion(config.to_state(), config.to_spec()), config.to_spec()
        )
        assert report.is_admissible
        assert report.unit_counts == {"zero": 1, "biannual": 1, "annual": 1}
        assert report.max_other < 1.0 - 1e-6

    def test_rank_mismatch_is_inadmissible(self):
        # claiming cointegration rank 1 at every frequency for a process with
        # none: the observed unit-root counts disagree with the claim
        n = 2
        spec = ModelSpec(n=n, k=4, d=4, s=0, r1=1, r2=1, r3=1)
        state = zero_rank_state(n, 4)
        comp = build_companion(state, spec)
        report = stability_check(comp.matrix, spec)  # raw matrix accepted too
        assert not report.is_admissible
        assert report.reason != ""

    def test_lag_coefficients_reconstruct_matrix(self):
        rng = np.random.default_rng(3)
        spec = ModelSpec(n=2, k=6, d=2, s=1, r1=1, r2=1, r3=1)
        hyper = PriorHyper.default(spec)
        state = sample_prior_state(spec, hyper, rng)
        comp = build_companion(state, spec)
        n, k = spec.n, spec.k
        top = np.hstack(comp.lag_coefs)
        assert np.allclose(comp.matrix[:n], top, atol=1e-14)
        assert np.allclose(comp.matrix[n:, : n * (k - 1)], np.eye(n * (k - 1)), atol=1e-14)
        assert np.allclose(comp.matrix[n:, n * (k - 1) :], 0.0, atol=1e-14)
        assert isinstance(comp, CompanionMatrix)

    def test_levels_coefficients_at_seasonal_roots(self):
        # evaluating the levels lag polynomial sum_j A_j z^j at the four
        # seasonal roots isolates one error-correction term at a time:
        # z=+1 gives I + 4 Pi_1, z=-1 gives I - 4 Pi_2, z=+i gives I + 4 Pi*
        rng = np.random.default_rng(4)
        spec = ModelSpec(n=3, k=6, d=4, s=0, r1=2, r2=1, r3=1)
        hyper = PriorHyper.default(spec)
        state = sample_prior_state(spec, hyper, rng)
        coefs = build_companion(state, spec).lag_coefs
        n = spec.n
        pi1 = state.A1 @ state.B1.T
        pi2 = state.A2 @ state.B2.T
        pi_star = state.A_star @ state.B_star.conj().T

        def evaluate(z):
            return sum((z ** (j + 1)) * c for j, c in enumerate(coefs))

        assert np.allclose(evaluate(1.0), np.eye(n) + 4.0 * pi1, atol=1e-10)
        assert np.allclose(evaluate(-1.0), np.eye(n) - 4.0 * pi2, atol=1e-10)
        assert np.allclose(evaluate(1j), np.eye(n) + 4.0 * pi_star, atol=1e-10)

    def test_unit_count_monotone_in_tolerance(self):
        rng = np.random.default_rng(5)
        spec = ModelSpec(n=2, k=5, d=4, s=0, r1=1, r2=1, r3=1)
        hyper = PriorHyper.default(spec)
        for _ in range(10):
            state = sample_prior_state(spec, hyper, rng)
            comp = build_companion(state, spec)
            prev = {"zero": 0, "biannual": 0, "annual": 0}
            for tol in (1e-8, 1e-6, 1e-4, 1e-2):
                counts = stability_check(comp, spec, tol_unit=tol).unit_counts
                assert all(counts[key] >= prev[key] for key in prev)
                prev = counts
