"""Numerical toolbox for fusion frames and distributed reconstruction.

Modules:
  numkit    dense linear-algebra substrate (orthonormalization, symmetric
            eigendecomposition, SPD solves, spectral norms)
  frames    classical frames: analysis/synthesis, bounds, canonical duals
  fusion    fusion frames and fusion frame systems: operators, bounds,
            redundancy, local-global bound transfer, transforms
  fixtures  JSON fixture files for fusion frame systems
  recon     exact, distributed and iterative reconstruction procedures
  perturb   perturbation constants and post-perturbation bound certificates
  cli       command-line experiment harness
"""

from .errors import (
    AllZero,
    BadDims,
    DimMismatch,
    EmptyBlock,
    FusionFramesError,
    HypothesisViolated,
    IndexOutOfRange,
    NotADual,
    NotAFrame,
    NotAPerturbation,
    NotInSubspace,
    NotPD,
    NotSymmetric,
    SchemaError,
    ShapeMismatch,
    Singular,
    ZeroVector,
)
from .frames import (
    Frame,
    FrameBounds,
    analysis,
    canonical_dual,
    frame_bounds,
    frame_operator,
    is_parseval,
    least_squares_check,
    synthesis,
)
from .fusion import (
    FusionBounds,
    FusionCoefficients,
    FusionFrame,
    FusionFrameSystem,
    Subspace,
    from_frame,
    fusion_analysis,
    fusion_bounds,
    fusion_frame_system,
    fusion_operator,
    fusion_operator_via_locals,
    fusion_synthesis,
    local_global_bounds,
    redundancy,
    split_frame,
    subspace_from_vectors,
    transform,
)
from .numkit import Spectrum, operator_norm, orthonormalize, solve_spd, sym_eig
from .recon import (
    LocalMeasurements,
    ReconReport,
    canonical_dual_gap,
    dual_relation_check,
    fused_global_dual,
    measure,
    reconstruct_exact,
    reconstruct_fused_dual,
    reconstruct_iterative,
    reconstruct_local_fusion,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
