"""Exception hierarchy shared by all fusionframes modules."""


class FusionFramesError(Exception):
    """Base class for all errors raised by this package."""


class AllZero(FusionFramesError):
    """Every input vector is (numerically) zero; there is no span to work with."""


class ZeroVector(FusionFramesError):
    """A single vector that must be nonzero is (numerically) zero."""


class NotSymmetric(FusionFramesError):
    """A matrix required to be symmetric fails the symmetry tolerance."""


class NotPD(FusionFramesError):
    """A matrix required to be positive definite is singular or indefinite."""


class Singular(FusionFramesError):
    """An operator required to be invertible is numerically singular."""


class DimMismatch(FusionFramesError):
    """Vector or matrix dimensions do not match the ambient space."""


class ShapeMismatch(FusionFramesError):
    """Two collections that must have identical shapes differ."""


class NotADual(FusionFramesError):
    """A supplied dual family fails the reconstruction identity."""


class NotInSubspace(FusionFramesError):
    """A coefficient vector sticks out of its subspace beyond tolerance."""


class NotAFrame(FusionFramesError):
    """The lower fusion frame bound is numerically zero; the operator is not invertible."""


class EmptyBlock(FusionFramesError):
    """A partition block contains no indices."""


class IndexOutOfRange(FusionFramesError):
    """A partition index does not address an existing vector."""


class HypothesisViolated(FusionFramesError):
    """A closed-form bound's hypothesis fails; carries the violated margin."""

    def __init__(self, message: str, margin: float | None = None):
        super().__init__(message)
        self.margin = margin


class NotAPerturbation(FusionFramesError):
    """The supplied pair of families is not a perturbation at the stated level."""


class SchemaError(FusionFramesError):
    """A fixture file does not conform to the JSON schema."""


class BadDims(FusionFramesError):
    """Requested generation dimensions are inconsistent."""
