"""Report serialization: JSON with 17-significant-digit floats, CSV tables.

The stock json encoder prints floats with repr; reports pin the format to
17 significant digits instead so every value round-trips bit-exactly and
the textual output is stable across Python versions. Non-finite floats
have no JSON literal and are emitted as the strings "inf"/"-inf"/"nan".
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

__all__ = ["fmt_float", "dumps", "write_csv"]


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _encode(dataclasses.asdict(obj), indent, level)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad_in}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, frozenset, set)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        if not seq:
            return "[]"
        items = [f"{pad_in}{_encode(v, indent, level + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Serialize to JSON text; floats carry 17 significant digits."""
    return _encode(obj, indent, 0)


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        s = fmt_float(v)
        return s.strip('"')
    return str(v)


def write_csv(fh, header, rows) -> None:
    """Write a CSV table with a mandatory header row."""
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(_cell(v) for v in row) + "\n")
