"""Report assembly and serialization (JSON canonical form, CSV flattening).

Reports are plain nested dicts.  JSON output is canonical (sorted keys,
fixed separators, trailing newline) so identical runs produce identical
bytes; the CSV form flattens leaves to dotted key paths, one header row and
one value row, floats rendered with repr so both formats carry the same
digits.  Writes are atomic: temp file in the target directory, then rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Any, Dict

import numpy as np

__all__ = ["canonical_json", "flatten", "to_csv", "write_atomic",
           "matrix_to_json", "amplitudes_to_json", "normalize"]


def normalize(value: Any):
    """Recursively coerce numpy scalars/arrays and dataclass-likes to JSON types."""
    if isinstance(value, dict):
        return {str(k): normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(v) for v in value]
    if isinstance(value, np.ndarray):
        return [normalize(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if hasattr(value, "to_dict"):
        return normalize(value.to_dict())
    return value


def canonical_json(report: dict) -> str:
    return json.dumps(normalize(report), sort_keys=True, indent=2,
                      ensure_ascii=True) + "\n"


def flatten(obj: Any, prefix: str = "") -> Dict[str, Any]:
    """Leaves of a nested structure keyed by dotted paths (lists by index)."""
    out: Dict[str, Any] = {}
    obj = normalize(obj)
    if isinstance(obj, dict):
        for key in sorted(obj):
            path = f"{prefix}.{key}" if prefix else str(key)
            out.update(flatten(obj[key], path))
    elif isinstance(obj, list):
        for i, item in enumerate(obj):
            path = f"{prefix}.{i}" if prefix else str(i)
            out.update(flatten(item, path))
    else:
        out[prefix] = obj
    return out


def _render(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(report: dict) -> str:
    flat = flatten(report)
    keys = list(flat)
    header = ",".join(f'"{k}"' if "," in k else k for k in keys)
    row = ",".join(_render(flat[k]) for k in keys)
    return header + "\n" + row + "\n"


def write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qauth-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def matrix_to_json(matrix: np.ndarray) -> list:
    """Nested lists of [re, im] pairs."""
    m = np.asarray(matrix, dtype=np.complex128)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def amplitudes_to_json(amps: np.ndarray) -> list:
    a = np.asarray(amps, dtype=np.complex128).reshape(-1)
    return [[float(v.real), float(v.imag)] for v in a]
