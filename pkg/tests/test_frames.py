import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusionframes.errors import AllZero, DimMismatch, NotADual
from fusionframes.frames import (
    Frame,
    analysis,
    canonical_dual,
    frame_bounds,
    frame_operator,
    is_parseval,
    least_squares_check,
    span_projector,
    synthesis,
)
from helpers import mercedes_frame


def standard_basis(m=2):
    return Frame(np.eye(m))


class TestAnalysisSynthesis:
    def test_analysis_standard_basis(self):
        np.testing.assert_allclose(analysis(standard_basis(), [3.0, 5.0]), [3.0, 5.0])

    def test_analysis_repeated_vector(self):
        f = Frame(np.array([[1.0, 1.0], [0.0, 0.0]]))
        np.testing.assert_allclose(analysis(f, [2.0, 7.0]), [2.0, 2.0])

    def test_analysis_mercedes(self):
        np.testing.assert_allclose(
            analysis(mercedes_frame(), [0.0, 1.0]), [1.0, -0.5, -0.5], atol=1e-15
        )

    def test_analysis_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            analysis(standard_basis(), [1.0, 2.0, 3.0])

    def test_synthesis_standard_basis(self):
        np.testing.assert_allclose(synthesis(standard_basis(), [3.0, 5.0]), [3.0, 5.0])

    def test_synthesis_zero(self):
        np.testing.assert_allclose(
            synthesis(mercedes_frame(), np.zeros(3)), np.zeros(2), atol=1e-16
        )

    def test_synthesis_mercedes(self):
        out = synthesis(mercedes_frame(), [1.0, -0.5, -0.5])
        np.testing.assert_allclose(out, [0.0, 1.5], atol=1e-15)

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(seed=st.integers(0, 10_000), m=st.integers(2, 8), n=st.integers(1, 12))
    def test_adjointness(self, seed, m, n):
        rng = np.random.default_rng(seed)
        frame = Frame(rng.standard_normal((m, n)))
        f = rng.standard_normal(m)
        c = rng.standard_normal(n)
        lhs = np.dot(analysis(frame, f), c)
        rhs = np.dot(f, synthesis(frame, c))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


class TestFrameOperatorAndBounds:
    def test_operator_standard_basis(self):
        np.testing.assert_allclose(frame_operator(standard_basis()), np.eye(2))

    def test_operator_mercedes_is_tight(self):
        np.testing.assert_allclose(
            frame_operator(mercedes_frame()), 1.5 * np.eye(2), atol=1e-14
        )

    def test_operator_mixed_pair(self):
        f = Frame(np.column_stack([[1.0, 0.0], np.array([1.0, 1.0]) / np.sqrt(2.0)]))
        np.testing.assert_allclose(
            frame_operator(f), [[1.5, 0.5], [0.5, 0.5]], atol=1e-15
        )

    def test_bounds_orthonormal(self):
        b = frame_bounds(standard_basis())
        assert b.lower == pytest.approx(1.0) and b.upper == pytest.approx(1.0)
        assert b.span_dim == 2

    def test_bounds_mercedes(self):
        b = frame_bounds(mercedes_frame())
        assert b.lower == pytest.approx(1.5, abs=1e-12)
        assert b.upper == pytest.approx(1.5, abs=1e-12)

    def test_bounds_mixed_pair(self):
        f = Frame(np.column_stack([[1.0, 0.0], np.array([1.0, 1.0]) / np.sqrt(2.0)]))
        b = frame_bounds(f)
        assert b.lower == pytest.approx(1.0 - np.sqrt(2.0) / 2.0, rel=1e-12)
        assert b.upper == pytest.approx(1.0 + np.sqrt(2.0) / 2.0, rel=1e-12)

    def test_bounds_all_zero(self):
        with pytest.raises(AllZero):
            frame_bounds(Frame(np.zeros((2, 3))))

    def test_frame_inequality_sampled(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            frame = Frame(rng.standard_normal((4, 7)))
            b = frame_bounds(frame)
            fs = rng.standard_normal((4, 1000))
            fs /= np.linalg.norm(fs, axis=0)
            energy = np.sum((frame.vectors.T @ fs) ** 2, axis=0)
            assert np.all(energy >= b.lower * (1.0 - 1e-9))
            assert np.all(energy <= b.upper * (1.0 + 1e-9))
            # extremes attained by eigenvector inputs
            from fusionframes.numkit import sym_eig

            spec = sym_eig(frame_operator(frame))
            for ev, bound in ((spec.eigenvectors[:, 0], b.lower), (spec.eigenvectors[:, -1], b.upper)):
                assert np.sum((frame.vectors.T @ ev) ** 2) == pytest.approx(bound, abs=1e-6)


class TestDuals:
    def test_canonical_dual_orthonormal_is_self(self):
        d = canonical_dual(standard_basis())
        np.testing.assert_allclose(d.vectors, np.eye(2))

    def test_canonical_dual_tight_is_scaled(self):
        d = canonical_dual(mercedes_frame())
        np.testing.assert_allclose(d.vectors, (2.0 / 3.0) * mercedes_frame().vectors, atol=1e-14)

    def test_canonical_dual_rank_deficient(self):
        f = Frame(np.array([[1.0, 1.0], [0.0, 0.0]]))
        d = canonical_dual(f)
        np.testing.assert_allclose(d.vectors, [[0.5, 0.5], [0.0, 0.0]], atol=1e-14)

    def test_duality_identity_random(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            m, n = int(rng.integers(2, 7)), int(rng.integers(2, 10))
            frame = Frame(rng.standard_normal((m, n)))
            dual = canonical_dual(frame)
            proj = span_projector(frame)
            for _ in range(5):
                f = proj @ rng.standard_normal(m)
                r1 = synthesis(dual, analysis(frame, f))
                r2 = synthesis(frame, analysis(dual, f))
                scale = max(np.linalg.norm(f), 1e-12)
                assert np.linalg.norm(r1 - f) <= 1e-9 * scale
                assert np.linalg.norm(r2 - f) <= 1e-9 * scale

    def test_is_parseval(self):
        assert is_parseval(standard_basis(), 1e-10)
        assert not is_parseval(mercedes_frame(), 1e-10)
        assert is_parseval(mercedes_frame().scaled(np.sqrt(2.0 / 3.0)), 1e-10)
        mixed = Frame(np.column_stack([[1.0, 0.0], np.array([1.0, 1.0]) / np.sqrt(2.0)]))
        assert not is_parseval(mixed, 1e-10)


class TestLeastSquares:
    def test_canonical_dual_is_least_squares_tie(self):
        f = mercedes_frame()
        e_canon, e_dual = least_squares_check(f, canonical_dual(f), [0.3, -1.2])
        assert e_canon == pytest.approx(e_dual, rel=1e-12)

    def test_alternate_dual_has_more_energy(self):
        frame = Frame(np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
        alt = Frame(np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]))
        e_canon, e_alt = least_squares_check(frame, alt, [1.0, 0.0])
        assert e_canon == pytest.approx(0.5, abs=1e-12)
        assert e_alt == pytest.approx(1.0, abs=1e-12)
        assert e_canon <= e_alt + 1e-10

    def test_zero_signal(self):
        f = mercedes_frame()
        assert least_squares_check(f, canonical_dual(f), [0.0, 0.0]) == (0.0, 0.0)

    def test_not_a_dual_raises(self):
        f = mercedes_frame()
        with pytest.raises(NotADual):
            least_squares_check(f, Frame(2.0 * f.vectors), [1.0, 0.0])

    def test_least_squares_property_random(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            m, n = 3, 6
            frame = Frame(rng.standard_normal((m, n)))
            canonical = canonical_dual(frame)
            # valid alternate dual: canonical + null-space shift
            p_row = np.linalg.pinv(frame.vectors) @ frame.vectors
            shift = rng.standard_normal((m, n)) @ (np.eye(n) - p_row)
            alt = Frame(canonical.vectors + shift)
            f = rng.standard_normal(m)
            e_canon, e_alt = least_squares_check(frame, alt, f)
            assert e_canon <= e_alt + 1e-10
