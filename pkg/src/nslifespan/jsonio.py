"""Deterministic JSON encoding for certificate reports.

Floats are written with 17 significant digits so a replaying process parses
back bit-identical doubles; infinities are encoded as the strings
"infinity" / "-infinity" (JSON has no literal for them); object keys are
emitted sorted. The output is byte-stable across runs for identical input.
"""

from __future__ import annotations

import json
import math
from typing import Any

__all__ = ["canonical_dumps", "decode_infinities", "fingerprint"]


def _format_float(x: float) -> str:
    if math.isnan(x):
        raise ValueError("NaN is not representable in a certificate report")
    if math.isinf(x):
        return '"infinity"' if x > 0 else '"-infinity"'
    return format(x, ".17g")


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(pad_in + it for it in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        keys = sorted(obj.keys())
        if any(not isinstance(k, str) for k in keys):
            raise TypeError("report keys must be strings")
        items = [
            pad_in + json.dumps(k, ensure_ascii=True) + ": " + _encode(obj[k], indent, level + 1)
            for k in keys
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"unsupported type in report: {type(obj)!r}")


def canonical_dumps(obj: Any, indent: int = 2) -> str:
    """Serialize a report to its canonical byte-stable form."""
    return _encode(obj, indent, 0) + "\n"


def decode_infinities(obj: Any) -> Any:
    """Recursively map the strings "infinity"/"-infinity" back to floats."""
    if isinstance(obj, str):
        if obj == "infinity":
            return math.inf
        if obj == "-infinity":
            return -math.inf
        return obj
    if isinstance(obj, list):
        return [decode_infinities(v) for v in obj]
    if isinstance(obj, dict):
        return {k: decode_infinities(v) for k, v in obj.items()}
    return obj


def fingerprint(obj: Any) -> str:
    """sha256 of the canonical serialization; deterministic run identifier."""
    import hashlib

    return "sha256:" + hashlib.sha256(canonical_dumps(obj).encode("utf-8")).hexdigest()
