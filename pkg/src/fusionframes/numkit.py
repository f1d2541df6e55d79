"""Dense linear-algebra substrate.

Everything downstream works with plain ``numpy.float64`` arrays: matrices are
2-d arrays with vectors stored as columns (column-by-column layout), vectors
are 1-d arrays.  The routines here wrap LAPACK (via numpy/scipy) behind the
tolerances the rest of the package relies on: numerical-rank orthonormal
bases, symmetric eigendecompositions, positive-definite solves with an
accuracy guarantee, and spectral norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import AllZero, DimMismatch, NotPD, NotSymmetric

# Relative threshold separating "zero" from "nonzero" singular/eigen values.
RANK_TOL = 1e-10

# Symmetry gate: ||S - S^T||_F <= SYM_TOL * ||S||_F.
SYM_TOL = 1e-10

# Positive-definite gate: smallest eigenvalue > PD_TOL * largest.
PD_TOL = 1e-12

# Residual target of solve(): ||S x - b|| <= SOLVE_TOL * ||b||.
SOLVE_TOL = 1e-10

Mat = np.ndarray


def as_matrix(a, name: str = "matrix") -> Mat:
    """Coerce to a float64 2-d array and reject non-finite entries."""
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DimMismatch(f"{name} must be 2-dimensional, got ndim={m.ndim}")
    if m.shape[0] < 1:
        raise DimMismatch(f"{name} must have at least one row")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return m


def as_vector(v, dim: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce to a float64 1-d array, optionally enforcing its length."""
    x = np.asarray(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    if dim is not None and x.size != dim:
        raise DimMismatch(f"{name} has length {x.size}, expected {dim}")
    return x


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a symmetric matrix.

    ``eigenvalues`` are ascending; ``eigenvectors`` holds the matching
    orthonormal eigenvectors as columns, so
    ``eigenvectors @ diag(eigenvalues) @ eigenvectors.T`` reconstructs the
    source matrix.
    """

    eigenvalues: np.ndarray
    eigenvectors: Mat

    @property
    def smallest(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def largest(self) -> float:
        return float(self.eigenvalues[-1])


def orthonormalize(vectors: Mat, rank_tol: float = RANK_TOL) -> Mat:
    """Orthonormal basis of the column space of ``vectors``.

    The basis is computed by SVD; columns with singular value at most
    ``rank_tol`` times the largest singular value are treated as numerically
    dependent, so the result has exactly numerical-rank many columns.

    Raises AllZero when every column is numerically zero.
    """
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    m = as_matrix(vectors, "vectors")
    if m.shape[1] == 0:
        raise AllZero("no vectors supplied")
    norms = np.linalg.norm(m, axis=0)
    if np.all(norms <= rank_tol):
        raise AllZero("all columns are numerically zero")
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    rank = int(np.sum(s > rank_tol * s[0]))
    if rank == 0:
        raise AllZero("all columns are numerically zero")
    return u[:, :rank]


def numerical_rank(a: Mat, rank_tol: float = RANK_TOL) -> int:
    """Number of singular values above ``rank_tol`` times the largest."""
    m = as_matrix(a, "matrix")
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))


def check_symmetric(s: Mat, tol: float = SYM_TOL, name: str = "matrix") -> Mat:
    m = as_matrix(s, name)
    if m.shape[0] != m.shape[1]:
        raise NotSymmetric(f"{name} is not square: {m.shape}")
    scale = np.linalg.norm(m)
    if np.linalg.norm(m - m.T) > tol * max(scale, 1e-300):
        raise NotSymmetric(f"{name} fails the symmetry tolerance {tol}")
    return m


def sym_eig(s: Mat) -> Spectrum:
    """Full spectrum of a symmetric matrix, eigenvalues ascending."""
    m = check_symmetric(s)
    w, v = np.linalg.eigh((m + m.T) / 2.0)
    return Spectrum(eigenvalues=w, eigenvectors=v)


class SpdSolver:
    """Cholesky factorization of an SPD matrix, reusable across right-hand sides.

    solve() refines the direct solution until the residual meets SOLVE_TOL,
    so repeated applications of the inverse stay accurate even for poorly
    conditioned (but still definite) matrices.
    """

    def __init__(self, s: Mat):
        m = check_symmetric(s)
        w = np.linalg.eigvalsh((m + m.T) / 2.0)
        if w[0] <= PD_TOL * max(w[-1], 0.0):
            raise NotPD(
                f"matrix is not positive definite (eigenvalue range [{w[0]:.3e}, {w[-1]:.3e}])"
            )
        self._s = m
        self._factor = cho_factor((m + m.T) / 2.0, lower=True)

    def solve(self, b) -> np.ndarray:
        """Solve S x = b with ||S x - b|| <= SOLVE_TOL * ||b||."""
        rhs = as_vector(b, dim=self._s.shape[0], name="right-hand side")
        x = cho_solve(self._factor, rhs)
        b_norm = np.linalg.norm(rhs)
        if b_norm == 0.0:
            return np.zeros_like(rhs)
        # A couple of refinement sweeps; each multiplies the residual by
        # roughly eps * cond(S), so this terminates immediately in the
        # well-conditioned case.
        for _ in range(5):
            r = rhs - self._s @ x
            if np.linalg.norm(r) <= SOLVE_TOL * b_norm:
                break
            x = x + cho_solve(self._factor, r)
        return x

    def solve_columns(self, b: Mat) -> Mat:
        """Solve against each column of ``b`` independently."""
        m = as_matrix(b, "right-hand sides")
        return np.column_stack([self.solve(m[:, j]) for j in range(m.shape[1])])


def solve_spd(s: Mat, b) -> np.ndarray:
    """One-shot SPD solve; see SpdSolver for the residual guarantee."""
    return SpdSolver(s).solve(b)


def operator_norm(a: Mat) -> float:
    """Largest singular value (spectral norm)."""
    m = as_matrix(a, "matrix")
    if not m.size:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])
