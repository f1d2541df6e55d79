"""JSON fixture files for fusion frame systems.

Schema (row-major nested arrays, vectors as matrix columns):

    {
      "ambient_dim": int,
      "components": [
        {
          "weight": number,                  # > 0
          "subspace_basis": [[number]],      # M x d, orthonormal columns
          "local_frame": [[number]],         # M x l, optional
          "local_dual": [[number]]           # M x l, optional
        },
        ...
      ]
    }

A component without ``local_frame`` defaults to the stored orthonormal basis
(a Parseval local frame); a missing ``local_dual`` defaults to the canonical
dual inside the subspace.  All numbers must be finite.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .frames import Frame, canonical_dual
from .fusion import FusionFrame, FusionFrameSystem, Subspace, fusion_frame_system


def _matrix_from_rows(rows, rows_expected: int, what: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise SchemaError(f"{what} must be a non-empty list of rows")
    width = len(rows[0])
    if width < 1 or any(len(r) != width for r in rows):
        raise SchemaError(f"{what} rows have inconsistent lengths")
    try:
        m = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{what} contains non-numeric entries") from exc
    if not np.all(np.isfinite(m)):
        raise SchemaError(f"{what} contains non-finite entries")
    if m.shape[0] != rows_expected:
        raise SchemaError(f"{what} has {m.shape[0]} rows, expected {rows_expected}")
    return m


def system_from_dict(doc: dict) -> FusionFrameSystem:
    """Build a fusion frame system from a parsed fixture document."""
    if not isinstance(doc, dict):
        raise SchemaError("fixture root must be a JSON object")
    ambient = doc.get("ambient_dim")
    if not isinstance(ambient, int) or ambient < 1:
        raise SchemaError("ambient_dim must be a positive integer")
    comps = doc.get("components")
    if not isinstance(comps, list) or not comps:
        raise SchemaError("components must be a non-empty array")
    components: list[tuple[Subspace, float]] = []
    local_frames: list[Frame] = []
    local_duals: list[Frame] = []
    for k, comp in enumerate(comps):
        if not isinstance(comp, dict):
            raise SchemaError(f"component {k} must be an object")
        weight = comp.get("weight")
        if not isinstance(weight, (int, float)) or not np.isfinite(weight) or weight <= 0:
            raise SchemaError(f"component {k} weight must be a positive finite number")
        basis = _matrix_from_rows(comp["subspace_basis"], ambient, f"component {k} subspace_basis") \
            if "subspace_basis" in comp else None
        if basis is None:
            raise SchemaError(f"component {k} is missing subspace_basis")
        try:
            sub = Subspace(basis)
        except ValueError as exc:
            raise SchemaError(f"component {k}: {exc}") from exc
        components.append((sub, float(weight)))
        if "local_frame" in comp:
            local = Frame(_matrix_from_rows(comp["local_frame"], ambient, f"component {k} local_frame"))
        else:
            local = Frame(sub.basis)
        local_frames.append(local)
        if "local_dual" in comp:
            dual = Frame(_matrix_from_rows(comp["local_dual"], ambient, f"component {k} local_dual"))
        else:
            dual = canonical_dual(local)
        local_duals.append(dual)
    try:
        return fusion_frame_system(FusionFrame(components), local_frames, local_duals)
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"fixture violates system invariants: {exc}") from exc


def system_to_dict(ffs: FusionFrameSystem, include_duals: bool = False) -> dict:
    """Serialize a system into the fixture schema."""
    components = []
    for (w, v), f, d in zip(ffs.fusion_frame.components, ffs.local_frames, ffs.local_duals):
        comp = {
            "weight": float(v),
            "subspace_basis": w.basis.tolist(),
            "local_frame": f.vectors.tolist(),
        }
        if include_duals:
            comp["local_dual"] = d.vectors.tolist()
        components.append(comp)
    return {"ambient_dim": ffs.ambient_dim, "components": components}


def load_system(path) -> FusionFrameSystem:
    """Read and validate a fixture file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    return system_from_dict(doc)


def save_system(ffs: FusionFrameSystem, path, include_duals: bool = False) -> None:
    """Write a fixture file (sorted keys, two-space indent, LF endings)."""
    doc = system_to_dict(ffs, include_duals=include_duals)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
