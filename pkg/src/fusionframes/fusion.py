"""Fusion frames: weighted families of subspaces and their operator theory.

A fusion frame is a family {(W_i, v_i)} of subspaces with positive weights
whose weighted projection energies sandwich every signal:

    C ||f||^2 <= sum_i v_i^2 ||P_i f||^2 <= D ||f||^2,

with P_i the orthogonal projection onto W_i.  The fusion frame operator

    S f = sum_i v_i^2 P_i f

is symmetric positive semidefinite; the optimal bounds C, D are its extreme
eigenvalues and the family is a frame exactly when C > 0.  A fusion frame
system additionally carries a local frame (and local duals) spanning each
subspace, which factorizes S through the local analysis/synthesis operators
and enables the distributed reconstruction procedures in ``recon``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    DimMismatch,
    EmptyBlock,
    IndexOutOfRange,
    NotADual,
    NotInSubspace,
    NotSymmetric,
    ShapeMismatch,
    Singular,
    ZeroVector,
)
from .frames import Frame, canonical_dual, frame_bounds, span_projector
from .numkit import (
    RANK_TOL,
    Mat,
    Spectrum,
    as_matrix,
    as_vector,
    numerical_rank,
    operator_norm,
    orthonormalize,
    sym_eig,
)

# A fusion frame counts as a frame when C > FRAME_TOL * D.
FRAME_TOL = 1e-10

# Tightness gate |D - C| <= TIGHT_TOL * D; Parseval additionally |C - 1| <= TIGHT_TOL.
TIGHT_TOL = 1e-8

# Pairwise projector products must vanish to this level for an orthonormal
# fusion basis.
ORTHO_TOL = 1e-9

# Subspace-membership gate used when synthesizing coefficient blocks.
MEMBERSHIP_TOL = 1e-6

# Fusion frame system construction tolerances.
LOCAL_CONTAINMENT_TOL = 1e-9
LOCAL_SPAN_TOL = 1e-8
LOCAL_DUAL_TOL = 1e-8


@dataclass(eq=False)
class Subspace:
    """A closed subspace of R^M, held as an orthonormal basis (M x d).

    The projector U U^T is cached on first use.  Instances are treated as
    immutable after construction.
    """

    basis: Mat

    def __post_init__(self):
        b = as_matrix(self.basis, "subspace basis")
        gram = b.T @ b
        if np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e-10:
            raise ValueError("subspace basis columns are not orthonormal")
        self.basis = b

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def projector(self) -> Mat:
        p = self.basis @ self.basis.T
        return (p + p.T) / 2.0

    def project(self, f: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.T @ f)


def subspace_from_vectors(vectors, rank_tol: float = RANK_TOL) -> Subspace:
    """Subspace spanned by the columns of ``vectors``."""
    return Subspace(orthonormalize(as_matrix(vectors, "vectors"), rank_tol))


@dataclass(eq=False)
class FusionFrame:
    """Weighted family of subspaces {(W_i, v_i)} in a common ambient space."""

    components: list[tuple[Subspace, float]]

    def __post_init__(self):
        if not self.components:
            raise ValueError("a fusion frame needs at least one component")
        dims = {w.ambient_dim for w, _ in self.components}
        if len(dims) != 1:
            raise DimMismatch(f"components live in different ambient spaces: {sorted(dims)}")
        for k, (_, v) in enumerate(self.components):
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"weight {k} must be a positive finite number, got {v}")
        self.components = [(w, float(v)) for w, v in self.components]

    @property
    def ambient_dim(self) -> int:
        return self.components[0][0].ambient_dim

    @property
    def subspaces(self) -> list[Subspace]:
        return [w for w, _ in self.components]

    @property
    def weights(self) -> np.ndarray:
        return np.array([v for _, v in self.components])

    def __len__(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class FusionBounds:
    """Spectral bounds of the fusion frame operator plus structure flags.

    ``lower``/``upper`` are the extreme eigenvalues of S (the optimal bounds;
    equivalently 1/||S^{-1}|| and ||S||).
    """

    lower: float
    upper: float
    is_frame: bool
    is_tight: bool
    is_parseval: bool
    is_orthonormal_fusion_basis: bool


@dataclass(eq=False)
class FusionCoefficients:
    """Blockwise representation {v_i P_i f}: one vector per component.

    Every entry lives in its subspace; the weights active at analysis time
    are kept alongside so synthesis can verify it is fed matching data.
    """

    entries: list[np.ndarray]
    weights: np.ndarray

    def __post_init__(self):
        self.entries = [as_vector(e, name=f"entry {k}") for k, e in enumerate(self.entries)]
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.entries) != self.weights.size:
            raise ShapeMismatch("one entry per weight required")


@dataclass(eq=False)
class FusionFrameSystem:
    """A fusion frame with a local frame and local duals spanning each W_i.

    Construction verifies the structural invariants: local vectors lie in
    their subspace, each local frame actually spans its subspace, and each
    local dual satisfies the reconstruction identity on it.  ``local_bounds``
    is the common pair (min_i A_i, max_i B_i) of the per-subspace optimal
    frame bounds.
    """

    fusion_frame: FusionFrame
    local_frames: list[Frame]
    local_duals: list[Frame]
    local_bounds: tuple[float, float] = field(init=False)

    def __post_init__(self):
        ff = self.fusion_frame
        if not (len(self.local_frames) == len(self.local_duals) == len(ff)):
            raise ShapeMismatch("one local frame and one local dual per subspace required")
        lowers, uppers = [], []
        for k, ((w, _), f, d) in enumerate(zip(ff.components, self.local_frames, self.local_duals)):
            if f.ambient_dim != ff.ambient_dim or d.ambient_dim != ff.ambient_dim:
                raise DimMismatch(f"local family {k} has wrong ambient dimension")
            if d.vectors.shape != f.vectors.shape:
                raise ShapeMismatch(f"local dual {k} has a different shape than its frame")
            _check_contained(f.vectors, w, k)
            if numerical_rank(f.vectors) != w.dim:
                raise ShapeMismatch(f"local frame {k} does not span its subspace")
            span_proj = span_projector(f)
            if operator_norm(span_proj - w.projector) > LOCAL_SPAN_TOL:
                raise ShapeMismatch(f"local frame {k} spans a different subspace")
            # Reconstruction identity on W_i, checked on its basis.
            recon = d.vectors @ (f.vectors.T @ w.basis)
            err = np.linalg.norm(recon - w.basis)
            if err > LOCAL_DUAL_TOL * np.sqrt(w.dim):
                raise NotADual(f"local dual {k} fails reconstruction by {err:.3e}")
            b = frame_bounds(f)
            lowers.append(b.lower)
            uppers.append(b.upper)
        self.local_bounds = (float(min(lowers)), float(max(uppers)))

    @property
    def ambient_dim(self) -> int:
        return self.fusion_frame.ambient_dim

    def __len__(self) -> int:
        return len(self.fusion_frame)


def _check_contained(vectors: Mat, w: Subspace, index: int, tol: float = LOCAL_CONTAINMENT_TOL):
    residual = vectors - w.basis @ (w.basis.T @ vectors)
    norms = np.linalg.norm(vectors, axis=0)
    bad = np.linalg.norm(residual, axis=0) > tol * np.maximum(norms, 1e-300)
    if np.any(bad):
        raise NotInSubspace(f"vector(s) {np.nonzero(bad)[0].tolist()} of family {index} leave W_{index}")


def fusion_frame_system(
    fusion_frame: FusionFrame,
    local_frames: Sequence[Frame],
    local_duals: Sequence[Frame] | None = None,
) -> FusionFrameSystem:
    """Assemble a system, defaulting the duals to the canonical dual in W_i."""
    if local_duals is None:
        local_duals = [canonical_dual(f) for f in local_frames]
    return FusionFrameSystem(fusion_frame, list(local_frames), list(local_duals))


def fusion_analysis(ff: FusionFrame, f) -> FusionCoefficients:
    """Blockwise analysis {v_i P_i f} of a signal."""
    x = as_vector(f, dim=ff.ambient_dim, name="signal")
    entries = [v * w.project(x) for w, v in ff.components]
    return FusionCoefficients(entries=entries, weights=ff.weights)


def fusion_synthesis(ff: FusionFrame, coeffs: FusionCoefficients) -> np.ndarray:
    """Weighted sum sum_i v_i c_i of the coefficient blocks.

    Applied to the output of fusion_analysis this realizes the fusion frame
    operator: synthesis(analysis(f)) = S f.
    """
    if len(coeffs.entries) != len(ff):
        raise DimMismatch(
            f"{len(coeffs.entries)} coefficient blocks for {len(ff)} components"
        )
    if np.max(np.abs(coeffs.weights - ff.weights)) > 1e-12:
        raise DimMismatch("coefficient weights do not match the fusion frame")
    out = np.zeros(ff.ambient_dim)
    for (w, v), entry in zip(ff.components, coeffs.entries):
        e = as_vector(entry, dim=ff.ambient_dim, name="coefficient block")
        norm = np.linalg.norm(e)
        if norm > 0 and np.linalg.norm(e - w.project(e)) > MEMBERSHIP_TOL * norm:
            raise NotInSubspace("coefficient block leaves its subspace")
        out += v * e
    return out


def fusion_operator(ff: FusionFrame) -> Mat:
    """The operator S = sum_i v_i^2 U_i U_i^T as a dense matrix."""
    s = np.zeros((ff.ambient_dim, ff.ambient_dim))
    for w, v in ff.components:
        s += (v * v) * w.projector
    return (s + s.T) / 2.0


def fusion_operator_via_locals(ffs: FusionFrameSystem) -> Mat:
    """S assembled from the local factorization sum_i v_i^2 Fdual_i F_i^T.

    Agrees with fusion_operator to 1e-9 in operator norm for any valid local
    duals; the accumulated sum is symmetrized once at the end.
    """
    ff = ffs.fusion_frame
    s = np.zeros((ff.ambient_dim, ff.ambient_dim))
    for (_, v), f, d in zip(ff.components, ffs.local_frames, ffs.local_duals):
        s += (v * v) * (d.vectors @ f.vectors.T)
    return (s + s.T) / 2.0


def fusion_spectrum(ff: FusionFrame) -> Spectrum:
    return sym_eig(fusion_operator(ff))


def fusion_bounds(ff: FusionFrame) -> FusionBounds:
    """Spectral bounds and the tight/Parseval/orthonormal-basis flags."""
    spec = fusion_spectrum(ff)
    c, d = spec.smallest, spec.largest
    is_frame = c > FRAME_TOL * max(d, 0.0)
    is_tight = is_frame and abs(d - c) <= TIGHT_TOL * d
    is_parseval = is_tight and abs(c - 1.0) <= TIGHT_TOL
    s = fusion_operator(ff)
    total_dim = sum(w.dim for w in ff.subspaces)
    onb = (
        total_dim == ff.ambient_dim
        and operator_norm(s - np.eye(ff.ambient_dim)) <= TIGHT_TOL
        and _pairwise_orthogonal(ff)
    )
    return FusionBounds(
        lower=c,
        upper=d,
        is_frame=bool(is_frame),
        is_tight=bool(is_tight),
        is_parseval=bool(is_parseval),
        is_orthonormal_fusion_basis=bool(onb),
    )


def _pairwise_orthogonal(ff: FusionFrame) -> bool:
    subs = ff.subspaces
    for i in range(len(subs)):
        for j in range(i + 1, len(subs)):
            if operator_norm(subs[i].basis.T @ subs[j].basis) > ORTHO_TOL:
                return False
    return True


def redundancy(ff: FusionFrame) -> float:
    """The value sum_i v_i^2 dim(W_i) / M.

    For a tight fusion frame this equals the tight bound C; for non-tight
    families it is simply trace(S)/M and carries no tightness claim.
    """
    total = sum((v * v) * w.dim for w, v in ff.components)
    return float(total) / ff.ambient_dim


def flattened_frame(ffs: FusionFrameSystem) -> Frame:
    """The global family {v_i f_ij}: all weighted local vectors, concatenated."""
    blocks = [
        v * f.vectors for (_, v), f in zip(ffs.fusion_frame.components, ffs.local_frames)
    ]
    return Frame(np.concatenate(blocks, axis=1), label="flattened")


def flattened_dual_vectors(ffs: FusionFrameSystem) -> Mat:
    """The weighted local duals {v_i fdual_ij}, concatenated column-wise."""
    blocks = [
        v * d.vectors for (_, v), d in zip(ffs.fusion_frame.components, ffs.local_duals)
    ]
    return np.concatenate(blocks, axis=1)


def local_global_bounds(
    ffs: FusionFrameSystem,
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Predicted [A*C, B*D] envelope versus measured flattened-frame bounds.

    With common local bounds (A, B) and fusion bounds (C, D), the family of
    all weighted local vectors is a frame whose optimal bounds always fall
    inside [A*C, B*D]; with Parseval local frames they equal (C, D).
    """
    a, b = ffs.local_bounds
    fb = fusion_bounds(ffs.fusion_frame)
    predicted = (a * fb.lower, b * fb.upper)
    measured = frame_bounds(flattened_frame(ffs))
    return predicted, (measured.lower, measured.upper)


def from_frame(frame: Frame) -> FusionFrame:
    """One rank-one subspace per vector, weighted by the vector's norm.

    The resulting fusion frame operator coincides with the frame operator of
    the original family, so both share their optimal bounds.
    """
    norms = np.linalg.norm(frame.vectors, axis=0)
    if np.any(norms <= 0.0):
        raise ZeroVector("every frame vector must be nonzero")
    components = []
    for j in range(frame.size):
        u = (frame.vectors[:, j] / norms[j]).reshape(-1, 1)
        components.append((Subspace(u), float(norms[j])))
    return FusionFrame(components)


def transform(ff: FusionFrame, t: Mat) -> FusionFrame:
    """Map every subspace through a symmetric invertible operator T.

    The image family {(T W_i, v_i)} keeps the original weights and has
    fusion frame operator T S T^{-1}; each image basis is re-orthonormalized
    because T does not preserve orthonormality.
    """
    m = as_matrix(t, "transform")
    if m.shape != (ff.ambient_dim, ff.ambient_dim):
        raise DimMismatch(f"transform must be {ff.ambient_dim} x {ff.ambient_dim}")
    scale = np.linalg.norm(m)
    if np.linalg.norm(m - m.T) > 1e-10 * max(scale, 1e-300):
        raise NotSymmetric("transform must be symmetric")
    svals = np.linalg.svd(m, compute_uv=False)
    if svals[-1] <= 1e-10 * svals[0]:
        raise Singular("transform is numerically singular")
    components = [
        (Subspace(orthonormalize(m @ w.basis)), v) for w, v in ff.components
    ]
    return FusionFrame(components)


def split_frame(
    frame: Frame,
    partition: Sequence[Sequence[int]],
    weights: Sequence[float],
) -> FusionFrameSystem:
    """Cut a frame into (possibly overlapping) blocks of columns.

    Block k spans subspace W_k and doubles as its local frame; the local
    duals are the canonical duals inside each span.  Indices are 0-based,
    blocks may overlap, and together they must cover every column.
    """
    if len(partition) != len(weights):
        raise ShapeMismatch("one weight per block required")
    covered: set[int] = set()
    blocks = []
    for k, block in enumerate(partition):
        idx = list(block)
        if not idx:
            raise EmptyBlock(f"block {k} is empty")
        for i in idx:
            if not (0 <= i < frame.size):
                raise IndexOutOfRange(f"block {k} addresses column {i} of {frame.size}")
        covered.update(idx)
        blocks.append(idx)
    if covered != set(range(frame.size)):
        missing = sorted(set(range(frame.size)) - covered)
        raise ValueError(f"partition does not cover columns {missing}")
    components = []
    local_frames = []
    for idx, v in zip(blocks, weights):
        vecs = frame.vectors[:, idx]
        components.append((subspace_from_vectors(vecs), float(v)))
        local_frames.append(Frame(vecs))
    return fusion_frame_system(FusionFrame(components), local_frames)
