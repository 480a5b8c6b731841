"""JSON file formats for tuples, kernel specs, and reports.

Complex entries are serialized as two-element arrays [re, im]. A tuple file
is {"m": int, "d": int, "matrices": [...]} where matrices is a list of m
row-major d x d matrices. Reports are emitted in canonical form (sorted keys,
fixed separators) so identical inputs produce byte-identical output. See
docs/formats.md for the complete description.
"""
from __future__ import annotations

import json

import numpy as np

from .rkhs import DiagonalKernelSpec, TruncationGrid
from .tuples import OperatorTuple, operator_tuple


def matrix_to_obj(M: np.ndarray) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_obj(obj, name: str = "matrix") -> np.ndarray:
    try:
        rows = [[complex(e[0], e[1]) for e in row] for row in obj]
    except (TypeError, IndexError) as exc:
        raise ValueError(f"malformed {name}: entries must be [re, im] pairs") from exc
    M = np.asarray(rows, dtype=complex)
    if M.ndim != 2:
        raise ValueError(f"malformed {name}: not two-dimensional")
    return M


def tuple_to_obj(T: OperatorTuple) -> dict:
    return {"m": T.m, "d": T.d, "matrices": [matrix_to_obj(A) for A in T]}


def tuple_from_obj(obj) -> OperatorTuple:
    if not isinstance(obj, dict) or "matrices" not in obj:
        raise ValueError("tuple object must be a dict with a 'matrices' field")
    mats = [matrix_from_obj(M, f"matrix {i}") for i, M in enumerate(obj["matrices"])]
    T = operator_tuple(mats)
    for field in ("m", "d"):
        if field in obj and int(obj[field]) != getattr(T, field):
            raise ValueError(f"declared {field}={obj[field]} does not match matrices")
    return T


def load_tuple(path: str) -> OperatorTuple:
    with open(path, "r", encoding="utf-8") as fh:
        return tuple_from_obj(json.load(fh))


def save_tuple(path: str, T: OperatorTuple) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(tuple_to_obj(T)))


_PRESETS = {
    "drury_arveson": "drury_arveson",
    "bergman": "bergman_k",
    "bergman_k": "bergman_k",
    "hardy": "hardy_like",
    "hardy_like": "hardy_like",
    "custom": "custom",
}


def kernel_job_from_obj(obj) -> tuple[DiagonalKernelSpec | None, TruncationGrid, str]:
    """Parse {"m", "preset", "k"?, "dmax", "custom_fhat"?}.

    Returns (spec, grid, preset-name); spec is None for the "spherical_shift"
    preset, which has no coefficient rule.
    """
    if not isinstance(obj, dict):
        raise ValueError("kernel spec must be a JSON object")
    try:
        m = int(obj["m"])
        dmax = int(obj["dmax"])
        preset = str(obj["preset"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("kernel spec needs integer 'm', 'dmax' and a 'preset'") from exc
    grid = TruncationGrid.build(m, dmax)
    if preset == "spherical_shift":
        return None, grid, preset
    if preset not in _PRESETS:
        raise ValueError(f"unknown preset {preset!r}")
    tag = _PRESETS[preset]
    if tag == "drury_arveson":
        return DiagonalKernelSpec.drury_arveson(m), grid, tag
    if tag == "bergman_k":
        if "k" not in obj:
            raise ValueError("bergman preset needs the exponent 'k'")
        return DiagonalKernelSpec.bergman(m, float(obj["k"])), grid, tag
    if tag == "hardy_like":
        return DiagonalKernelSpec.hardy(m), grid, tag
    entries = obj.get("custom_fhat")
    if not entries:
        raise ValueError("custom preset needs 'custom_fhat' entries")
    table = {}
    for pair in entries:
        alpha, value = pair
        table[tuple(int(a) for a in alpha)] = float(value)
    missing = [a for a in grid.indices if a not in table]
    upper = [tuple(np.add(a, e)) for a in grid.indices
             for e in np.eye(m, dtype=int)]
    missing += [a for a in set(upper) if a not in table]
    if missing:
        raise ValueError(f"custom coefficient rule is missing {sorted(missing)[:4]}...")
    return DiagonalKernelSpec.custom(m, table), grid, tag


def canonical_json(obj) -> str:
    """Deterministic serialization: sorted keys, no whitespace variance."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=True, allow_nan=False) + "\n"
