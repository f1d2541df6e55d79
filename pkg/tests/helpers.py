"""Shared fixture builders for the test suite."""

from __future__ import annotations

import numpy as np

from fusionframes.frames import Frame, pseudo_inverse_apply
from fusionframes.fusion import (
    FusionFrame,
    FusionFrameSystem,
    Subspace,
    fusion_bounds,
    fusion_frame_system,
    subspace_from_vectors,
)
from fusionframes.numkit import orthonormalize


def mercedes_frame() -> Frame:
    """Three unit vectors at 90, 210 and 330 degrees: a tight frame with bound 3/2."""
    angles = np.deg2rad([90.0, 210.0, 330.0])
    return Frame(np.vstack([np.cos(angles), np.sin(angles)]))


def eigen_gap_fusion_frame() -> FusionFrame:
    """Two lines in the plane whose operator has eigenvalues 1 -+ sqrt(2)/2."""
    w1 = Subspace(np.array([[1.0], [0.0]]))
    w2 = Subspace(np.array([[1.0], [1.0]]) / np.sqrt(2.0))
    return FusionFrame([(w1, 1.0), (w2, 1.0)])


def tight_overlap_fusion_frame() -> FusionFrame:
    """{span e1, span e2, R^2} with unit weights: tight with bound 2."""
    return FusionFrame(
        [
            (Subspace(np.array([[1.0], [0.0]])), 1.0),
            (Subspace(np.array([[0.0], [1.0]])), 1.0),
            (Subspace(np.eye(2)), 1.0),
        ]
    )


def onb_fusion_system(m: int = 4, k: int = 2, seed: int = 0) -> FusionFrameSystem:
    """Orthonormal fusion basis from a random orthogonal matrix, unit weights."""
    rng = np.random.default_rng(seed)
    q = orthonormalize(rng.standard_normal((m, m)))
    splits = np.array_split(np.arange(m), k)
    comps = [(Subspace(q[:, idx]), 1.0) for idx in splits]
    locals_ = [Frame(q[:, idx]) for idx in splits]
    return fusion_frame_system(FusionFrame(comps), locals_)


def gap_counterexample_system() -> FusionFrameSystem:
    """Overlapping subspaces with non-Parseval locals: the fused dual family
    genuinely differs from the canonical dual of the flattened family.

    W1 = span e1 with local frame {2 e1}; W2 = R^2 with local frame {e1, e2};
    unit weights.  The flattened family {2e1, e1, e2} is redundant, so its
    canonical dual is not forced to coincide with the fused one."""
    w1 = Subspace(np.array([[1.0], [0.0]]))
    w2 = Subspace(np.eye(2))
    ff = FusionFrame([(w1, 1.0), (w2, 1.0)])
    return fusion_frame_system(ff, [Frame(np.array([[2.0], [0.0]])), Frame(np.eye(2))])


def orthogonal_nonparseval_system() -> FusionFrameSystem:
    """Orthonormal fusion basis of R^2 whose local frames are not Parseval."""
    w1 = Subspace(np.array([[1.0], [0.0]]))
    w2 = Subspace(np.array([[0.0], [1.0]]))
    ff = FusionFrame([(w1, 1.0), (w2, 1.0)])
    locals_ = [
        Frame(np.array([[2.0, 1.0], [0.0, 0.0]])),  # bounds 5 on span e1
        Frame(np.array([[0.0], [3.0]])),            # bound 9 on span e2
    ]
    return fusion_frame_system(ff, locals_)


def random_fusion_frame(
    rng: np.random.Generator,
    ambient_dim: int | None = None,
    n_subspaces: int | None = None,
    weight_range: tuple[float, float] = (0.5, 2.0),
) -> FusionFrame:
    """Random spanning fusion frame with Gaussian subspaces."""
    m = ambient_dim if ambient_dim is not None else int(rng.integers(3, 13))
    k = n_subspaces if n_subspaces is not None else int(rng.integers(2, 7))
    for _ in range(20):
        dims = [int(rng.integers(1, max(m, 2))) for _ in range(k)]
        if sum(dims) < m:
            continue
        comps = [
            (
                subspace_from_vectors(rng.standard_normal((m, d))),
                float(rng.uniform(*weight_range)),
            )
            for d in dims
        ]
        ff = FusionFrame(comps)
        if fusion_bounds(ff).is_frame:
            return ff
    raise RuntimeError("could not draw a spanning fusion frame")


def random_local_frames(
    rng: np.random.Generator,
    ff: FusionFrame,
    extra: int = 2,
    parseval: bool = False,
) -> list[Frame]:
    """Local frames spanning each subspace, optionally Parseval on it."""
    frames = []
    for w, _ in ff.components:
        size = w.dim + extra
        if parseval:
            q = orthonormalize(rng.standard_normal((size, w.dim)))
            frames.append(Frame(w.basis @ q.T))
        else:
            coeff = rng.standard_normal((w.dim, size))
            frames.append(Frame(w.basis @ coeff))
    return frames


def alternate_duals(
    rng: np.random.Generator, ff: FusionFrame, frames: list[Frame], scale: float = 0.5
) -> list[Frame]:
    """Valid non-canonical local duals: canonical plus a null-space shift."""
    duals = []
    for (w, _), f in zip(ff.components, frames):
        canonical = pseudo_inverse_apply(f, f.vectors)
        p_row = np.linalg.pinv(f.vectors) @ f.vectors
        shift = (w.projector @ rng.standard_normal(f.vectors.shape)) @ (
            np.eye(f.size) - p_row
        )
        duals.append(Frame(canonical + scale * shift))
    return duals


def random_system(
    rng: np.random.Generator,
    ambient_dim: int | None = None,
    n_subspaces: int | None = None,
    extra: int = 2,
    parseval: bool = False,
    use_alternate_duals: bool = False,
) -> FusionFrameSystem:
    ff = random_fusion_frame(rng, ambient_dim, n_subspaces)
    frames = random_local_frames(rng, ff, extra=extra, parseval=parseval)
    duals = alternate_duals(rng, ff, frames) if use_alternate_duals else None
    return fusion_frame_system(ff, frames, duals)
