"""Classical frame machinery: analysis/synthesis, frame bounds, duals.

A frame is stored as the matrix ``F`` whose columns are the frame vectors.
The analysis operator is then ``f -> F.T @ f``, synthesis is ``c -> F @ c``,
and the frame operator is ``S = F @ F.T``.  Families that span only a proper
subspace of the ambient space are first class: bounds, canonical duals and
the Parseval test all act on the span, with the frame operator inverted as a
pseudo-inverse (inverse on the span, zero on its orthogonal complement).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AllZero, DimMismatch, NotADual, ShapeMismatch
from .numkit import RANK_TOL, Mat, as_matrix, as_vector, orthonormalize, sym_eig

# Dual families are accepted when the reconstruction identity holds to this
# relative tolerance on the span (loose enough for pseudo-inverse round-off).
DUAL_TOL = 1e-8


@dataclass(frozen=True)
class Frame:
    """A finite family of vectors in R^M, stored as matrix columns."""

    vectors: Mat
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "vectors", as_matrix(self.vectors, "frame vectors"))
        if self.vectors.shape[1] < 1:
            raise DimMismatch("a frame needs at least one vector")

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def size(self) -> int:
        return self.vectors.shape[1]

    def scaled(self, factor: float) -> "Frame":
        return Frame(self.vectors * factor, label=self.label)


@dataclass(frozen=True)
class FrameBounds:
    """Optimal frame bounds over the span of the family.

    ``lower``/``upper`` are the extreme nonzero eigenvalues of the frame
    operator; ``span_dim`` is the numerical rank of the family.
    """

    lower: float
    upper: float
    span_dim: int


def analysis(frame: Frame, f) -> np.ndarray:
    """Coefficients <f, f_i> of a signal against every frame vector."""
    x = as_vector(f, dim=frame.ambient_dim, name="signal")
    return frame.vectors.T @ x


def synthesis(frame: Frame, coefficients) -> np.ndarray:
    """Weighted sum sum_i c_i f_i of the frame vectors."""
    c = as_vector(coefficients, dim=frame.size, name="coefficients")
    return frame.vectors @ c


def frame_operator(frame: Frame) -> Mat:
    """The positive semidefinite operator S = sum_i f_i f_i^T."""
    s = frame.vectors @ frame.vectors.T
    return (s + s.T) / 2.0


def span_projector(frame: Frame, rank_tol: float = RANK_TOL) -> Mat:
    """Orthogonal projector onto the span of the frame vectors."""
    u = orthonormalize(frame.vectors, rank_tol)
    return u @ u.T


def frame_bounds(frame: Frame, rank_tol: float = RANK_TOL) -> FrameBounds:
    """Optimal bounds: extreme nonzero eigenvalues of the frame operator."""
    spec = sym_eig(frame_operator(frame))
    w = spec.eigenvalues
    if w[-1] <= 0.0:
        raise AllZero("all frame vectors are zero")
    nonzero = w[w > rank_tol * w[-1]]
    if nonzero.size == 0:
        raise AllZero("all frame vectors are numerically zero")
    return FrameBounds(lower=float(nonzero[0]), upper=float(nonzero[-1]), span_dim=int(nonzero.size))


def pseudo_inverse_apply(frame: Frame, vectors: Mat, rank_tol: float = RANK_TOL) -> Mat:
    """Apply the frame operator's pseudo-inverse to each column.

    Inverts on the span of the frame; annihilates the orthogonal complement.
    """
    spec = sym_eig(frame_operator(frame))
    w, v = spec.eigenvalues, spec.eigenvectors
    if w[-1] <= 0.0:
        raise AllZero("all frame vectors are zero")
    inv = np.where(w > rank_tol * w[-1], 1.0 / np.where(w == 0.0, 1.0, w), 0.0)
    b = as_matrix(vectors, "vectors")
    return v @ (inv[:, None] * (v.T @ b))


def canonical_dual(frame: Frame) -> Frame:
    """The dual family S^+ f_i (minimal coefficient energy among all duals)."""
    return Frame(pseudo_inverse_apply(frame, frame.vectors), label=frame.label)


def is_parseval(frame: Frame, tol: float = 1e-8) -> bool:
    """True when the frame operator acts as the identity on the span."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    spec = sym_eig(frame_operator(frame))
    w = spec.eigenvalues
    if w[-1] <= 0.0:
        return False
    nonzero = w[w > RANK_TOL * w[-1]]
    # On the span, S - P_span has eigenvalues (lambda_i - 1); elsewhere zero.
    return bool(np.max(np.abs(nonzero - 1.0)) <= tol)


def _check_dual(frame: Frame, dual: Frame, tol: float = DUAL_TOL) -> Mat:
    """Verify the reconstruction identity on the span; return the span basis."""
    if dual.vectors.shape != frame.vectors.shape:
        raise ShapeMismatch(
            f"dual has shape {dual.vectors.shape}, frame has {frame.vectors.shape}"
        )
    u = orthonormalize(frame.vectors)
    # Both identities sum<f,f_i> dual_i = f and sum<f,dual_i> f_i = f,
    # checked column-by-column on an orthonormal basis of the span.
    recon1 = dual.vectors @ (frame.vectors.T @ u)
    recon2 = frame.vectors @ (dual.vectors.T @ u)
    err = max(np.linalg.norm(recon1 - u), np.linalg.norm(recon2 - u))
    if err > tol * np.sqrt(u.shape[1]):
        raise NotADual(f"reconstruction identity fails by {err:.3e}")
    return u


def least_squares_check(frame: Frame, dual: Frame, f) -> tuple[float, float]:
    """Coefficient energies (canonical, supplied) for reconstructing ``f``.

    The canonical coefficients <f, S^+ f_i> never carry more energy than the
    coefficients <f, dual_i> of any other verified dual.
    """
    _check_dual(frame, dual)
    x = as_vector(f, dim=frame.ambient_dim, name="signal")
    canon = canonical_dual(frame)
    e_canon = float(np.sum((canon.vectors.T @ x) ** 2))
    e_dual = float(np.sum((dual.vectors.T @ x) ** 2))
    return e_canon, e_dual
