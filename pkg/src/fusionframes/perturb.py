"""Robustness certificates for perturbed subspaces and local frames.

Two perturbation notions are quantified:

* subspace level: W~ is a (lambda1, lambda2, eps)-perturbation of W when
  ||(P - P~)f|| <= lambda1 ||P f|| + lambda2 ||P~ f|| + eps ||f|| for all f.
  The additive eps term is unavoidable: if the inequality held with eps = 0
  the projections would be equal.
* synthesis level: a family {g_i} is a (lambda1, lambda2)-perturbation of
  {f_i} when ||sum a_i (f_i - g_i)|| <= lambda1 ||sum a_i f_i||
  + lambda2 ||sum a_i g_i|| for every coefficient sequence.

For each notion this module estimates the smallest constant two ways: a
sampled projected-ascent maximization (a lower estimate of the true optimum)
and a cheap certified envelope that is always valid (the projector-difference
norm, respectively an operator-norm/smallest-singular-value quotient).
Closed-form post-perturbation fusion bounds are computed from either notion,
and ``perturbation_experiment`` replays the bound predictions against
measured bounds on randomly perturbed systems.  Every containment statement
uses the certified constants only; the ascent estimates are reported for
diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, HypothesisViolated, NotAPerturbation, ShapeMismatch
from .frames import Frame
from .fusion import (
    FusionFrame,
    FusionFrameSystem,
    Subspace,
    fusion_bounds,
    subspace_from_vectors,
)
from .numkit import numerical_rank, operator_norm

ASCENT_STEPS = 50
ASCENT_STEP_SIZE = 0.1


@dataclass(frozen=True)
class EpsilonEstimate:
    """Additive constant for a subspace perturbation at fixed lambdas.

    ``estimate`` comes from sampled ascent and can undershoot the true
    supremum; ``certified`` is the projector-difference norm, always a valid
    eps for lambda1 = lambda2 = 0 (and hence for any nonnegative lambdas).
    """

    estimate: float
    certified: float


@dataclass(frozen=True)
class LambdaEstimate:
    """Symmetric synthesis-perturbation constant (lambda1 = lambda2).

    ``estimate`` maximizes ||(F - G)a|| / (||Fa|| + ||Ga||) by sampled
    ascent; ``certified`` is the conservative quotient
    ||F - G|| / (sigma_min(F) + sigma_min(G)).
    """

    estimate: float
    certified: float


@dataclass(frozen=True)
class SubspacePerturbation:
    """Verification record of the subspace inequality at (lambda1, lambda2, eps)."""

    lambda1: float
    lambda2: float
    epsilon: float
    component_verified: list[bool]

    def __post_init__(self):
        _check_lambdas(self.lambda1, self.lambda2)
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    @property
    def all_verified(self) -> bool:
        return all(self.component_verified)


@dataclass(frozen=True)
class FramePerturbation:
    """Synthesis-level perturbation constants."""

    lambda1: float
    lambda2: float

    def __post_init__(self):
        _check_lambdas(self.lambda1, self.lambda2)


@dataclass(frozen=True)
class EquivalenceReport:
    """Observed consequences of a synthesis-level perturbation.

    ``ratio_low``/``ratio_high`` are the extreme observed norm quotients
    ||Fa|| / ||Ga||; ``dim_equal`` compares numerical ranks; ``iso_const`` is
    the smallest observed ||P (P~ f)|| / ||P~ f|| over the sampled signals.
    """

    ratio_low: float
    ratio_high: float
    dim_equal: bool
    iso_const: float


@dataclass(eq=False)
class TrialRow:
    trial: int
    mode: str
    noise_scale: float
    measured: float
    hypothesis_ok: bool
    predicted_lower: float | None
    predicted_upper: float | None
    actual_lower: float
    actual_upper: float
    contained: bool | None
    discarded: bool = False


@dataclass(eq=False)
class PerturbationReport:
    mode: str
    noise_scale: float
    rows: list[TrialRow]

    @property
    def hypothesis_passes(self) -> int:
        return sum(1 for r in self.rows if r.hypothesis_ok and not r.discarded)

    @property
    def containment_rate(self) -> float:
        checked = [r for r in self.rows if r.hypothesis_ok and not r.discarded]
        if not checked:
            return float("nan")
        return sum(1 for r in checked if r.contained) / len(checked)


def _check_lambdas(lambda1: float, lambda2: float) -> None:
    if not (0 <= lambda1 < 1 and 0 <= lambda2 < 1):
        raise ValueError("lambda constants must lie in [0, 1)")


def _ascend(objective, gradient, start: np.ndarray) -> float:
    """Projected gradient ascent on the unit sphere; returns the best value."""
    f = start / np.linalg.norm(start)
    best = objective(f)
    for _ in range(ASCENT_STEPS):
        g = gradient(f)
        f = f + ASCENT_STEP_SIZE * g
        norm = np.linalg.norm(f)
        if norm == 0.0:
            break
        f /= norm
        best = max(best, objective(f))
    return best


def subspace_epsilon(
    w: Subspace,
    wt: Subspace,
    lambda1: float = 0.0,
    lambda2: float = 0.0,
    samples: int = 64,
    seed: int = 0,
) -> EpsilonEstimate:
    """Smallest additive constant making the subspace inequality hold.

    Maximizes ||(P - P~)f|| - lambda1 ||P f|| - lambda2 ||P~ f|| over unit
    vectors with ``samples`` ascent restarts.  The estimate never exceeds the
    certified value ||P - P~||.
    """
    if w.ambient_dim != wt.ambient_dim:
        raise DimMismatch("subspaces live in different ambient spaces")
    _check_lambdas(lambda1, lambda2)
    diff = w.projector - wt.projector
    p, pt = w.projector, wt.projector

    def objective(f):
        return (
            np.linalg.norm(diff @ f)
            - lambda1 * np.linalg.norm(p @ f)
            - lambda2 * np.linalg.norm(pt @ f)
        )

    def gradient(f):
        g = np.zeros_like(f)
        df = diff @ f
        n = np.linalg.norm(df)
        if n > 1e-14:
            g += diff.T @ df / n
        pf = p @ f
        n = np.linalg.norm(pf)
        if n > 1e-14:
            g -= lambda1 * pf / n
        ptf = pt @ f
        n = np.linalg.norm(ptf)
        if n > 1e-14:
            g -= lambda2 * ptf / n
        return g

    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(samples):
        start = rng.standard_normal(w.ambient_dim)
        best = max(best, _ascend(objective, gradient, start))
    certified = operator_norm(diff)
    return EpsilonEstimate(estimate=max(best, 0.0), certified=certified)


def no_perturbation_of_projection_check(
    w: Subspace,
    wt: Subspace,
    lambda1: float = 0.0,
    lambda2: float = 0.0,
    samples: int = 64,
    seed: int = 0,
) -> bool:
    """Numerical rendering of "a zero additive constant forces equality".

    True iff: the ascent estimate being numerically zero implies the
    projectors agree in operator norm.  Distinct subspaces always admit a
    witness vector with positive deficit, so the implication holds
    vacuously; identical subspaces satisfy both sides.
    """
    est = subspace_epsilon(w, wt, lambda1, lambda2, samples=samples, seed=seed)
    if est.estimate > 1e-10:
        return True
    return operator_norm(w.projector - wt.projector) <= 1e-8


def sum_squared_weights(ff: FusionFrame) -> float:
    return float(np.sum(ff.weights**2))


def predicted_bounds_subspace(
    ff: FusionFrame, lambda1: float, lambda2: float, epsilon: float
) -> tuple[float, float]:
    """Closed-form fusion bounds after a (lambda1, lambda2, eps)-perturbation.

    Requires (1 - lambda1) sqrt(C) - eps sqrt(sum v_i^2) > 0; the returned
    pair brackets the optimal bounds of any perturbed family at that level.
    """
    _check_lambdas(lambda1, lambda2)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    b = fusion_bounds(ff)
    c, d = b.lower, b.upper
    sv = np.sqrt(sum_squared_weights(ff))
    margin = (1.0 - lambda1) * np.sqrt(max(c, 0.0)) - epsilon * sv
    if margin <= 0.0:
        raise HypothesisViolated(
            f"(1 - lambda1) sqrt(C) - eps sqrt(sum v^2) = {margin:.6e} <= 0",
            margin=float(margin),
        )
    lower = (margin / (1.0 + lambda2)) ** 2
    upper = ((np.sqrt(d) * (1.0 + lambda1) + epsilon * sv) / (1.0 - lambda2)) ** 2
    return float(lower), float(upper)


def frame_perturbation_lambda(
    f: Frame, ft: Frame, samples: int = 64, seed: int = 0
) -> LambdaEstimate:
    """Smallest symmetric constant of a synthesis-level perturbation.

    Maximizes ||(F - G)a|| / (||Fa|| + ||Ga||) over coefficient sequences by
    sampled ascent; also returns the conservative certified quotient.
    """
    if f.vectors.shape != ft.vectors.shape:
        raise ShapeMismatch("the two families must have identical shapes")
    fm, gm = f.vectors, ft.vectors
    dm = fm - gm

    def objective(a):
        denom = np.linalg.norm(fm @ a) + np.linalg.norm(gm @ a)
        if denom <= 1e-300:
            return 0.0
        return np.linalg.norm(dm @ a) / denom

    def gradient(a):
        da, fa, ga = dm @ a, fm @ a, gm @ a
        nd, nf, ng = np.linalg.norm(da), np.linalg.norm(fa), np.linalg.norm(ga)
        denom = nf + ng
        if denom <= 1e-300 or nd <= 1e-300:
            return np.zeros_like(a)
        grad_num = dm.T @ da / nd
        grad_den = np.zeros_like(a)
        if nf > 1e-14:
            grad_den += fm.T @ fa / nf
        if ng > 1e-14:
            grad_den += gm.T @ ga / ng
        return grad_num / denom - (nd / denom**2) * grad_den

    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(samples):
        start = rng.standard_normal(fm.shape[1])
        best = max(best, _ascend(objective, gradient, start))
    smin_f = float(np.linalg.svd(fm, compute_uv=False)[-1])
    smin_g = float(np.linalg.svd(gm, compute_uv=False)[-1])
    certified = operator_norm(dm) / max(smin_f + smin_g, 1e-300)
    return LambdaEstimate(estimate=float(best), certified=float(certified))


def perturbation_kappa(lambda1: float, lambda2: float) -> float:
    """The isomorphism constant (1-l1)/(1+l2) - l1 (1+l2)/(1-l1) - l2.

    Positive whenever both constants are at most 1/5.
    """
    _check_lambdas(lambda1, lambda2)
    return (
        (1.0 - lambda1) / (1.0 + lambda2)
        - lambda1 * (1.0 + lambda2) / (1.0 - lambda1)
        - lambda2
    )


def equivalence_check(
    f: Frame,
    ft: Frame,
    lambda1: float,
    lambda2: float,
    samples: int = 256,
    seed: int = 0,
) -> EquivalenceReport:
    """Observed norm-quotient envelope, rank equality, and isomorphism constant.

    The pair must first verify as a perturbation at the stated level (via
    the sampled constant).  Quotients ||Fa|| / ||Ga|| stay within
    [(1-l1)/(1+l2), (1+l2)/(1-l1)], the spans have equal dimension, and the
    projection of one span onto the other contracts norms by no more than
    the kappa constant whenever that constant is positive.
    """
    _check_lambdas(lambda1, lambda2)
    est = frame_perturbation_lambda(f, ft, samples=min(samples, 64), seed=seed)
    if est.estimate > max(lambda1, lambda2) + 1e-9:
        raise NotAPerturbation(
            f"sampled constant {est.estimate:.6e} exceeds max(lambda1, lambda2)"
        )
    fm, gm = f.vectors, ft.vectors
    rng = np.random.default_rng(seed)
    ratio_low, ratio_high = np.inf, -np.inf
    for _ in range(samples):
        a = rng.standard_normal(fm.shape[1])
        nf, ng = np.linalg.norm(fm @ a), np.linalg.norm(gm @ a)
        if ng <= 1e-300:
            continue
        ratio = nf / ng
        ratio_low = min(ratio_low, ratio)
        ratio_high = max(ratio_high, ratio)
    dim_equal = numerical_rank(fm) == numerical_rank(gm)
    w = subspace_from_vectors(fm)
    wt = subspace_from_vectors(gm)
    iso = np.inf
    for _ in range(samples):
        x = rng.standard_normal(fm.shape[0])
        ptx = wt.project(x)
        n = np.linalg.norm(ptx)
        if n <= 1e-12:
            continue
        iso = min(iso, np.linalg.norm(w.project(ptx)) / n)
    return EquivalenceReport(
        ratio_low=float(ratio_low),
        ratio_high=float(ratio_high),
        dim_equal=bool(dim_equal),
        iso_const=float(iso),
    )


def predicted_bounds_local(
    ffs: FusionFrameSystem, lambda1: float, lambda2: float
) -> tuple[float, float, float]:
    """Fusion bounds after perturbing every local frame at (lambda1, lambda2).

    The induced subspace constant is eps = sqrt(2 (1 - kappa)); requires
    sqrt(C) - eps sqrt(sum v_i^2) > 0.  Returns (eps, lower, upper).
    """
    kappa = perturbation_kappa(lambda1, lambda2)
    eps = float(np.sqrt(max(2.0 * (1.0 - kappa), 0.0)))
    ff = ffs.fusion_frame
    b = fusion_bounds(ff)
    sv = np.sqrt(sum_squared_weights(ff))
    margin = np.sqrt(max(b.lower, 0.0)) - eps * sv
    if margin <= 0.0:
        raise HypothesisViolated(
            f"sqrt(C) - eps sqrt(sum v^2) = {margin:.6e} <= 0", margin=float(margin)
        )
    lower = margin**2
    upper = (np.sqrt(b.upper) + eps * sv) ** 2
    return eps, float(lower), float(upper)


def verify_subspace_perturbation(
    ff: FusionFrame,
    ff_tilde: FusionFrame,
    lambda1: float,
    lambda2: float,
    epsilon: float,
    samples: int = 1000,
    seed: int = 0,
    slack: float = 1e-9,
) -> SubspacePerturbation:
    """Sample-check the subspace inequality for every component pair."""
    if len(ff) != len(ff_tilde):
        raise ShapeMismatch("component counts differ")
    rng = np.random.default_rng(seed)
    dim = ff.ambient_dim
    fs = rng.standard_normal((dim, samples))
    fs /= np.linalg.norm(fs, axis=0)
    verified = []
    for (w, _), (wt, _) in zip(ff.components, ff_tilde.components):
        lhs = np.linalg.norm((w.projector - wt.projector) @ fs, axis=0)
        rhs = (
            lambda1 * np.linalg.norm(w.projector @ fs, axis=0)
            + lambda2 * np.linalg.norm(wt.projector @ fs, axis=0)
            + epsilon
        )
        verified.append(bool(np.all(lhs <= rhs + slack)))
    return SubspacePerturbation(
        lambda1=lambda1, lambda2=lambda2, epsilon=epsilon, component_verified=verified
    )


def _rotate_subspace(w: Subspace, angle: float, rng: np.random.Generator) -> Subspace:
    """Tilt one basis direction into a random direction orthogonal to W.

    Leaves the subspace untouched when it already fills the ambient space.
    """
    m, d = w.ambient_dim, w.dim
    if d >= m or angle == 0.0:
        return Subspace(w.basis.copy())
    # Random unit vector in the orthogonal complement.
    q = rng.standard_normal(m)
    q = q - w.basis @ (w.basis.T @ q)
    norm = np.linalg.norm(q)
    if norm <= 1e-12:
        return Subspace(w.basis.copy())
    q /= norm
    j = int(rng.integers(d))
    basis = w.basis.copy()
    basis[:, j] = np.cos(angle) * basis[:, j] + np.sin(angle) * q
    return Subspace(basis)


def perturbation_experiment(
    ffs: FusionFrameSystem,
    noise_scale: float,
    mode: str,
    trials: int,
    seed: int = 0,
) -> PerturbationReport:
    """Replay the closed-form bound predictions on random perturbations.

    Modes:
      * ``subspace-rotate``: tilt each subspace by a random principal angle
        of at most ``noise_scale`` radians; certify eps as the largest
        projector-difference norm and predict bounds at lambda = 0.
      * ``local-frame-jitter``: add Gaussian noise of scale ``noise_scale``
        to every local frame vector and respan; certify a symmetric lambda
        per subspace and predict bounds through the induced eps.  Trials
        where the jitter changes a local frame's rank are discarded.

    Each trial records measured constants, the hypothesis gate, predicted
    and measured bounds, and whether the measured bounds landed inside the
    prediction (checked only when the gate passes).
    """
    if mode not in ("subspace-rotate", "local-frame-jitter"):
        raise ValueError(f"unknown mode {mode!r}")
    ff = ffs.fusion_frame
    rows = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        if mode == "subspace-rotate":
            row = _subspace_trial(ff, noise_scale, trial, rng)
        else:
            row = _jitter_trial(ffs, noise_scale, trial, rng)
        rows.append(row)
    return PerturbationReport(mode=mode, noise_scale=noise_scale, rows=rows)


def _containment(
    predicted: tuple[float, float] | None, actual: tuple[float, float]
) -> bool | None:
    if predicted is None:
        return None
    lo, hi = predicted
    return bool(actual[0] >= lo * (1.0 - 1e-9) and actual[1] <= hi * (1.0 + 1e-9))


def _subspace_trial(
    ff: FusionFrame, noise_scale: float, trial: int, rng: np.random.Generator
) -> TrialRow:
    perturbed = FusionFrame(
        [
            (_rotate_subspace(w, float(rng.uniform(0.0, noise_scale)), rng), v)
            for w, v in ff.components
        ]
    )
    eps_cert = max(
        operator_norm(w.projector - wt.projector)
        for (w, _), (wt, _) in zip(ff.components, perturbed.components)
    )
    actual = fusion_bounds(perturbed)
    if eps_cert <= 0.0:
        # Unperturbed: prediction degenerates to the original bounds.
        orig = fusion_bounds(ff)
        predicted = (orig.lower, orig.upper)
        hypothesis_ok = True
    else:
        try:
            predicted = predicted_bounds_subspace(ff, 0.0, 0.0, eps_cert)
            hypothesis_ok = True
        except HypothesisViolated:
            predicted = None
            hypothesis_ok = False
    return TrialRow(
        trial=trial,
        mode="subspace-rotate",
        noise_scale=noise_scale,
        measured=float(eps_cert),
        hypothesis_ok=hypothesis_ok,
        predicted_lower=None if predicted is None else predicted[0],
        predicted_upper=None if predicted is None else predicted[1],
        actual_lower=actual.lower,
        actual_upper=actual.upper,
        contained=_containment(predicted, (actual.lower, actual.upper)),
    )


def _jitter_trial(
    ffs: FusionFrameSystem, noise_scale: float, trial: int, rng: np.random.Generator
) -> TrialRow:
    ff = ffs.fusion_frame
    lam_cert = 0.0
    perturbed_components = []
    discarded = False
    for (w, v), f in zip(ff.components, ffs.local_frames):
        jitter = noise_scale * rng.standard_normal(f.vectors.shape)
        g = Frame(f.vectors + jitter)
        if numerical_rank(g.vectors) != numerical_rank(f.vectors):
            discarded = True
            break
        est = frame_perturbation_lambda(f, g, samples=0)
        lam_cert = max(lam_cert, est.certified)
        perturbed_components.append((subspace_from_vectors(g.vectors), v))
    if discarded or lam_cert >= 1.0:
        actual = fusion_bounds(ff)
        return TrialRow(
            trial=trial,
            mode="local-frame-jitter",
            noise_scale=noise_scale,
            measured=float(lam_cert),
            hypothesis_ok=False,
            predicted_lower=None,
            predicted_upper=None,
            actual_lower=actual.lower,
            actual_upper=actual.upper,
            contained=None,
            discarded=True,
        )
    perturbed = FusionFrame(perturbed_components)
    actual = fusion_bounds(perturbed)
    try:
        _, lower, upper = predicted_bounds_local(ffs, lam_cert, lam_cert)
        predicted = (lower, upper)
        hypothesis_ok = True
    except HypothesisViolated:
        predicted = None
        hypothesis_ok = False
    return TrialRow(
        trial=trial,
        mode="local-frame-jitter",
        noise_scale=noise_scale,
        measured=float(lam_cert),
        hypothesis_ok=hypothesis_ok,
        predicted_lower=None if predicted is None else predicted[0],
        predicted_upper=None if predicted is None else predicted[1],
        actual_lower=actual.lower,
        actual_upper=actual.upper,
        contained=_containment(predicted, (actual.lower, actual.upper)),
        discarded=False,
    )
