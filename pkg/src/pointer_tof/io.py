"""Bit-stable JSON and CSV emission (17 significant digits, no locale)."""

from __future__ import annotations

import json
import math
from typing import Any, Iterable, Optional, Sequence

import numpy as np


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    return format(x, ".17g")


def _encode(obj: Any, indent: Optional[int], level: int) -> str:
    """``indent=None`` gives single-line output."""
    if indent is None:
        pad = end = ""
        open_sep, item_sep = "", ", "
    else:
        pad = " " * (indent * (level + 1))
        end = "\n" + " " * (indent * level)
        open_sep, item_sep = "\n", ",\n"
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + open_sep + item_sep.join(items) + (end if indent is not None else "") + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if indent is None or all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[" + open_sep + item_sep.join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def dumps_compact(obj: Any) -> str:
    """Single-line variant for CSV comment headers."""
    return _encode(obj, None, 0)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[float]], metadata: Any = None) -> str:
    lines = []
    if metadata is not None:
        lines.append("# " + dumps_compact(metadata))
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_float(v) for v in row))
    return "\n".join(lines) + "\n"


def read_csv(text: str):
    """Parse ``csv_text`` output back into (metadata, header, rows)."""
    metadata = None
    lines = text.splitlines()
    if lines and lines[0].startswith("#"):
        metadata = json.loads(lines[0][1:])
        lines = lines[1:]
    header = lines[0].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:] if line], dtype=float)
    return metadata, header, rows
