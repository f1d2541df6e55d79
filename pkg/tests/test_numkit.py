import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusionframes.errors import AllZero, NotPD, NotSymmetric
from fusionframes.numkit import (
    SpdSolver,
    operator_norm,
    orthonormalize,
    solve_spd,
    sym_eig,
)


class TestOrthonormalize:
    def test_identity_is_fixed(self):
        u = orthonormalize(np.eye(3), rank_tol=1e-10)
        assert u.shape == (3, 3)
        np.testing.assert_allclose(u @ u.T, np.eye(3), atol=1e-12)

    def test_rank_one_collapse(self):
        u = orthonormalize(np.array([[1.0, 2.0], [0.0, 0.0]]), rank_tol=1e-10)
        assert u.shape == (2, 1)
        np.testing.assert_allclose(u @ u.T, np.diag([1.0, 0.0]), atol=1e-12)

    def test_two_independent_columns(self):
        u = orthonormalize(np.array([[1.0, 1.0], [1.0, -1.0]]))
        assert u.shape == (2, 2)
        np.testing.assert_allclose(u.T @ u, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(u @ u.T, np.eye(2), atol=1e-12)

    def test_all_zero_raises(self):
        with pytest.raises(AllZero):
            orthonormalize(np.zeros((3, 2)))

    def test_idempotent_up_to_rotation(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            m = rng.standard_normal((6, 3))
            u1 = orthonormalize(m)
            u2 = orthonormalize(u1)
            np.testing.assert_allclose(u1 @ u1.T, u2 @ u2.T, atol=1e-10)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            orthonormalize(np.array([[np.nan], [1.0]]))


class TestSymEig:
    def test_identity(self):
        np.testing.assert_allclose(sym_eig(np.eye(2)).eigenvalues, [1.0, 1.0])

    def test_diagonal(self):
        np.testing.assert_allclose(sym_eig(np.diag([2.0, 5.0])).eigenvalues, [2.0, 5.0])

    def test_two_by_two(self):
        # trace 2, determinant 1/2: eigenvalues 1 -+ sqrt(2)/2
        spec = sym_eig(np.array([[1.5, 0.5], [0.5, 0.5]]))
        expected = [1.0 - np.sqrt(2.0) / 2.0, 1.0 + np.sqrt(2.0) / 2.0]
        np.testing.assert_allclose(spec.eigenvalues, expected, rtol=1e-12)

    def test_not_symmetric_raises(self):
        with pytest.raises(NotSymmetric):
            sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(dim=st.integers(2, 20), seed=st.integers(0, 10_000))
    def test_reconstructs_source(self, dim, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((dim, dim))
        s = (a + a.T) / 2.0
        spec = sym_eig(s)
        rebuilt = spec.eigenvectors @ np.diag(spec.eigenvalues) @ spec.eigenvectors.T
        assert np.linalg.norm(rebuilt - s) <= 1e-10 * np.linalg.norm(s)


class TestSolveSpd:
    def test_identity(self):
        np.testing.assert_allclose(solve_spd(np.eye(2), [3.0, 4.0]), [3.0, 4.0])

    def test_scaled_identity(self):
        np.testing.assert_allclose(solve_spd(2.0 * np.eye(2), [2.0, 4.0]), [1.0, 2.0])

    def test_two_by_two(self):
        x = solve_spd(np.array([[1.5, 0.5], [0.5, 0.5]]), [1.0, 0.0])
        np.testing.assert_allclose(x, [1.0, -1.0], atol=1e-12)

    @pytest.mark.parametrize("bad", [np.diag([1.0, 0.0]), -np.eye(3)])
    def test_not_pd_raises(self, bad):
        with pytest.raises(NotPD):
            solve_spd(bad, np.ones(bad.shape[0]))

    def test_round_trip_residual(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            dim = int(rng.integers(2, 12))
            a = rng.standard_normal((dim, dim + 2))
            s = a @ a.T + 1e-6 * np.eye(dim)
            b = rng.standard_normal(dim)
            x = solve_spd(s, b)
            assert np.linalg.norm(s @ x - b) <= 1e-10 * np.linalg.norm(b)

    def test_solver_reuse_matches_one_shot(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((6, 8))
        s = a @ a.T + 0.1 * np.eye(6)
        solver = SpdSolver(s)
        for _ in range(4):
            b = rng.standard_normal(6)
            np.testing.assert_allclose(solver.solve(b), solve_spd(s, b), atol=1e-12)


class TestOperatorNorm:
    def test_identity(self):
        assert operator_norm(np.eye(3)) == pytest.approx(1.0, rel=1e-9)

    def test_zero(self):
        assert operator_norm(np.zeros((2, 4))) == 0.0

    def test_diagonal_sign(self):
        assert operator_norm(np.diag([3.0, -7.0])) == pytest.approx(7.0, rel=1e-9)
