"""Command-line front end: fixtures in JSON, experiment grids in CSV.

Subcommands:

* ``generate``  write a fixture file (random subspaces, a split frame, or an
                orthonormal fusion basis), fully determined by the seed.
* ``check``     bound/tightness/redundancy report for a fixture (JSON).
* ``recon``     run every reconstruction procedure on a fixture and report
                residuals, inverse-operator counters and the iterative trace
                (CSV).
* ``perturb``   seeded perturbation sweep with predicted-vs-measured bound
                containment (CSV).
* ``simulate``  sensor-style simulation: noisy local measurements, random
                subspace dropout under detected/undetected failure handling,
                error statistics over a (sigma, dropout) grid (CSV).

Any long flag may also be supplied through a JSON config file (``--config``);
explicit command-line values win.  Exit codes: 0 success, 1 usage or I/O
error, 2 mathematical failure (schema violation, no frame, failed
containment).  Diagnostics go to stderr; data goes to the output file or
stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadDims, FusionFramesError, NotAFrame, SchemaError
from .fixtures import load_system, save_system
from .frames import Frame
from .fusion import (
    FusionFrame,
    FusionFrameSystem,
    fusion_bounds,
    fusion_frame_system,
    fusion_operator,
    fusion_operator_via_locals,
    local_global_bounds,
    redundancy,
    split_frame,
    subspace_from_vectors,
)
from .numkit import operator_norm, orthonormalize
from .perturb import perturbation_experiment
from .recon import (
    LocalMeasurements,
    fused_global_dual,
    measure,
    reconstruct_centralized,
    reconstruct_fused_dual,
    reconstruct_iterative,
    reconstruct_local_fusion,
)
from .fusion import fusion_analysis

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MATH = 2


@dataclass(eq=False)
class RunConfig:
    """Fully resolved options of one invocation; the seed pins all randomness."""

    command: str
    input: str | None = None
    output: str | None = None
    seed: int = 0
    dim: int = 8
    subspaces: int = 4
    subspace_dim: int = 2
    local_size: int = 3
    frame_size: int = 20
    kind: str = "random"
    sigma: str = "0.0"
    dropout: str = "0.0"
    trials: int = 50
    noise: float = 0.05
    mode: str = "subspace-rotate"
    max_iter: int = 100
    tol: float = 1e-10
    timing: bool = False


def _fmt(x) -> str:
    """17-significant-digit decimal rendering for CSV cells."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_csv(path: str | None, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(cell) for cell in row])
    data = buf.getvalue()
    if path:
        Path(path).write_text(data, encoding="utf-8", newline="")
    else:
        sys.stdout.write(data)


def _write_json(path: str | None, doc: dict) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def _parse_grid(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in str(text).split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise BadDims(f"bad numeric list {text!r}") from exc
    if not values:
        raise BadDims(f"empty numeric list {text!r}")
    return values


def _generate_system(cfg: RunConfig) -> FusionFrameSystem:
    rng = np.random.default_rng(cfg.seed)
    m = cfg.dim
    k = cfg.subspaces
    if m < 1 or k < 1:
        raise BadDims("dim and subspaces must be positive")
    if cfg.kind == "onb":
        if k > m:
            raise BadDims("an orthonormal fusion basis needs subspaces <= dim")
        q = orthonormalize(rng.standard_normal((m, m)))
        splits = np.array_split(np.arange(m), k)
        comps, locals_ = [], []
        for idx in splits:
            if idx.size == 0:
                raise BadDims("too many subspaces for this dimension")
            basis = q[:, idx]
            comps.append((subspace_from_vectors(basis), 1.0))
            locals_.append(Frame(basis))
        return fusion_frame_system(FusionFrame(comps), locals_)
    if cfg.kind == "split":
        n = cfg.frame_size
        if n < m or n < k:
            raise BadDims("frame_size must be at least dim and subspaces")
        vectors = rng.standard_normal((m, n))
        bounds = np.linspace(0, n, k + 1).astype(int)
        blocks = []
        for i in range(k):
            lo = max(bounds[i] - 1, 0) if i > 0 else 0  # one-column overlap
            hi = bounds[i + 1]
            blocks.append(list(range(lo, hi)))
        return split_frame(Frame(vectors), blocks, [1.0] * k)
    if cfg.kind == "random":
        d, l = cfg.subspace_dim, cfg.local_size
        if not (1 <= d <= m):
            raise BadDims("subspace_dim must lie in [1, dim]")
        if l < d:
            raise BadDims("local_size must be at least subspace_dim")
        if d * k < m:
            raise BadDims("subspaces * subspace_dim must reach dim for a frame")
        comps, locals_ = [], []
        for _ in range(k):
            basis = orthonormalize(rng.standard_normal((m, d)))
            coeff = rng.standard_normal((d, l))
            comps.append((subspace_from_vectors(basis), float(rng.uniform(0.5, 2.0))))
            locals_.append(Frame(basis @ coeff))
        return fusion_frame_system(FusionFrame(comps), locals_)
    raise BadDims(f"unknown fixture kind {cfg.kind!r}")


def cmd_generate(cfg: RunConfig) -> int:
    ffs = _generate_system(cfg)
    if not fusion_bounds(ffs.fusion_frame).is_frame:
        raise NotAFrame("generated fixture is not a frame; choose other dims or seed")
    if cfg.output:
        save_system(ffs, cfg.output)
    else:
        from .fixtures import system_to_dict

        _write_json(None, system_to_dict(ffs))
    return EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    if not cfg.input:
        raise BadDims("check requires --input")
    ffs = load_system(cfg.input)
    ff = ffs.fusion_frame
    b = fusion_bounds(ff)
    (pred_lo, pred_hi), (act_lo, act_hi) = local_global_bounds(ffs)
    agreement = operator_norm(fusion_operator(ff) - fusion_operator_via_locals(ffs))
    report = {
        "ambient_dim": ff.ambient_dim,
        "components": len(ff),
        "lower": b.lower,
        "upper": b.upper,
        "is_frame": b.is_frame,
        "is_tight": b.is_tight,
        "is_parseval": b.is_parseval,
        "is_orthonormal_fusion_basis": b.is_orthonormal_fusion_basis,
        "redundancy": redundancy(ff),
        "local_lower": ffs.local_bounds[0],
        "local_upper": ffs.local_bounds[1],
        "predicted_flat_lower": pred_lo,
        "predicted_flat_upper": pred_hi,
        "actual_flat_lower": act_lo,
        "actual_flat_upper": act_hi,
        "operator_agreement": agreement,
    }
    _write_json(cfg.output, report)
    if not b.is_frame:
        print("fixture is not a fusion frame (lower bound ~ 0)", file=sys.stderr)
        return EXIT_MATH
    return EXIT_OK


def cmd_recon(cfg: RunConfig) -> int:
    if not cfg.input:
        raise BadDims("recon requires --input")
    ffs = load_system(cfg.input)
    ff = ffs.fusion_frame
    rng = np.random.default_rng(cfg.seed)
    f = rng.standard_normal(ff.ambient_dim)
    f /= np.linalg.norm(f)
    m = measure(ffs, f)
    rows = []

    def run(label, fn):
        t0 = time.perf_counter()
        report = fn()
        elapsed = time.perf_counter() - t0
        rows.append(
            [
                "method",
                label,
                "",
                report.residual,
                report.inverse_applications,
                report.precomputed_inverse_applications,
                elapsed if cfg.timing else None,
            ]
        )
        return report

    run("local-fusion", lambda: reconstruct_local_fusion(ffs, m, reference=f))
    dual = fused_global_dual(ffs)
    run(
        "fused-dual",
        lambda: reconstruct_fused_dual(ffs, m, reference=f, precomputed=dual),
    )
    run("centralized", lambda: reconstruct_centralized(ffs, m, reference=f))
    coeffs = fusion_analysis(ff, f)
    iterative = run(
        "iterative",
        lambda: reconstruct_iterative(ff, coeffs, n_max=cfg.max_iter, tol=cfg.tol, reference=f),
    )
    for step in iterative.trace or []:
        rows.append(["trace", "iterative", step.n, step.actual, "", "", None, step.bound])
    header = [
        "row",
        "method",
        "n",
        "residual",
        "inverse_applications",
        "precomputed_inverse_applications",
        "wall_time",
        "bound",
    ]
    rows = [r + [""] * (len(header) - len(r)) for r in rows]
    _write_csv(cfg.output, header, rows)
    return EXIT_OK


def cmd_perturb(cfg: RunConfig) -> int:
    if not cfg.input:
        raise BadDims("perturb requires --input")
    ffs = load_system(cfg.input)
    report = perturbation_experiment(
        ffs, noise_scale=cfg.noise, mode=cfg.mode, trials=cfg.trials, seed=cfg.seed
    )
    rows = []
    for r in report.rows:
        rows.append(
            [
                "trial",
                r.trial,
                r.mode,
                r.noise_scale,
                r.measured,
                r.hypothesis_ok,
                r.predicted_lower,
                r.predicted_upper,
                r.actual_lower,
                r.actual_upper,
                r.contained,
                r.discarded,
            ]
        )
    rate = report.containment_rate
    rows.append(
        [
            "summary",
            len(report.rows),
            report.mode,
            report.noise_scale,
            "",
            report.hypothesis_passes,
            "",
            "",
            "",
            "",
            rate if rate == rate else "",  # blank cell when no trial passed the gate
            "",
        ]
    )
    header = [
        "row",
        "trial",
        "mode",
        "noise_scale",
        "measured",
        "hypothesis_ok",
        "predicted_lower",
        "predicted_upper",
        "actual_lower",
        "actual_upper",
        "contained",
        "discarded",
    ]
    _write_csv(cfg.output, header, rows)
    if report.hypothesis_passes > 0 and rate < 1.0:
        print(f"containment rate {rate:.6f} below 1", file=sys.stderr)
        return EXIT_MATH
    return EXIT_OK


def _survivor_system(ffs: FusionFrameSystem, keep: list[int]) -> FusionFrameSystem | None:
    if not keep:
        return None
    ff = ffs.fusion_frame
    sub = FusionFrame([ff.components[i] for i in keep])
    if not fusion_bounds(sub).is_frame:
        return None
    return fusion_frame_system(
        sub, [ffs.local_frames[i] for i in keep], [ffs.local_duals[i] for i in keep]
    )


def cmd_simulate(cfg: RunConfig) -> int:
    if not cfg.input:
        raise BadDims("simulate requires --input")
    ffs = load_system(cfg.input)
    ff = ffs.fusion_frame
    sigmas = _parse_grid(cfg.sigma)
    dropouts = _parse_grid(cfg.dropout)
    rows = []
    for sigma in sigmas:
        for dropout in dropouts:
            stats = {"undetected": [], "detected": []}
            failed = {"undetected": 0, "detected": 0}
            for trial in range(cfg.trials):
                rng = np.random.default_rng([cfg.seed, trial])
                f = rng.standard_normal(ff.ambient_dim)
                f /= np.linalg.norm(f)
                clean = measure(ffs, f)
                noisy = [
                    c + sigma * rng.standard_normal(c.size) for c in clean.coefficients
                ]
                drop = rng.random(len(ff)) < dropout
                # Undetected failure: dropped blocks read as zero, the
                # original operator is still inverted.
                zeroed = [
                    np.zeros_like(c) if drop[i] else c for i, c in enumerate(noisy)
                ]
                rep = reconstruct_local_fusion(
                    ffs, LocalMeasurements(zeroed), reference=f
                )
                stats["undetected"].append(rep.residual)
                # Detected failure: the operator is rebuilt over survivors.
                keep = [i for i in range(len(ff)) if not drop[i]]
                survivor = _survivor_system(ffs, keep)
                if survivor is None:
                    failed["detected"] += 1
                else:
                    kept = LocalMeasurements([noisy[i] for i in keep])
                    rep = reconstruct_local_fusion(survivor, kept, reference=f)
                    stats["detected"].append(rep.residual)
            for mode in ("undetected", "detected"):
                errs = np.array(stats[mode], dtype=float)
                rows.append(
                    [
                        sigma,
                        dropout,
                        mode,
                        cfg.trials,
                        failed[mode],
                        float(np.mean(errs)) if errs.size else "",
                        float(np.median(errs)) if errs.size else "",
                        float(np.max(errs)) if errs.size else "",
                    ]
                )
    header = ["sigma", "dropout", "mode", "trials", "failed", "mean_error", "median_error", "max_error"]
    _write_csv(cfg.output, header, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusionframes",
        description="Fusion frame construction, reconstruction and robustness experiments.",
    )
    parser.add_argument("--config", help="JSON file of flag defaults (command line wins)")
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommand_parsers = {}  # type: ignore[attr-defined]

    def add_parser(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        parser.subcommand_parsers[name] = p  # type: ignore[attr-defined]
        return p

    def common(p):
        p.add_argument("--input", help="fixture file to read")
        p.add_argument("--output", help="file to write (stdout when omitted)")
        p.add_argument("--seed", type=int, default=0, help="root seed for all randomness")

    g = add_parser("generate", help="write a fixture file")
    common(g)
    g.add_argument("--dim", type=int, default=8, help="ambient dimension M")
    g.add_argument("--subspaces", type=int, default=4, help="number of subspaces")
    g.add_argument("--subspace-dim", type=int, default=2, help="dimension of each subspace")
    g.add_argument("--local-size", type=int, default=3, help="vectors per local frame")
    g.add_argument("--frame-size", type=int, default=20, help="vectors in the split frame")
    g.add_argument(
        "--kind",
        choices=["random", "split", "onb"],
        default="random",
        help="random subspaces, overlapping split of a random frame, or an orthonormal fusion basis",
    )

    c = add_parser("check", help="bound and tightness report")
    common(c)

    r = add_parser("recon", help="run all reconstruction procedures")
    common(r)
    r.add_argument("--max-iter", type=int, default=100, help="iteration cap")
    r.add_argument("--tol", type=float, default=1e-10, help="certified-bound stop tolerance")
    r.add_argument("--timing", action="store_true", help="include wall times (breaks byte-determinism)")

    p = add_parser("perturb", help="perturbation sweep")
    common(p)
    p.add_argument("--noise", type=float, default=0.05, help="perturbation scale")
    p.add_argument(
        "--mode",
        choices=["subspace-rotate", "local-frame-jitter"],
        default="subspace-rotate",
    )
    p.add_argument("--trials", type=int, default=50, help="number of trials")

    s = add_parser("simulate", help="noisy sensor simulation with dropout")
    common(s)
    s.add_argument("--sigma", default="0.0", help="comma-separated noise levels")
    s.add_argument("--dropout", default="0.0", help="comma-separated dropout probabilities")
    s.add_argument("--trials", type=int, default=50, help="trials per grid cell")
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Fold --config file values into the parser defaults."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return argv
    try:
        doc = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config file: {exc}")
    if not isinstance(doc, dict):
        parser.error("config file must hold a JSON object")
    values = {str(k).replace("-", "_"): v for k, v in doc.items()}
    parser.set_defaults(**values)
    for sp in parser.subcommand_parsers.values():  # type: ignore[attr-defined]
        dests = {a.dest for a in sp._actions}
        sp.set_defaults(**{k: v for k, v in values.items() if k in dests})
    return argv


COMMANDS = {
    "generate": cmd_generate,
    "check": cmd_check,
    "recon": cmd_recon,
    "perturb": cmd_perturb,
    "simulate": cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    argv = _apply_config_file(parser, argv)
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    fields = {f for f in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**{k: v for k, v in vars(ns).items() if k in fields and v is not None})
    try:
        return COMMANDS[cfg.command](cfg)
    except (SchemaError, NotAFrame) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH
    except FusionFramesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
