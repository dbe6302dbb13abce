"""Deterministic JSON and CSV writers (reals with 17 significant digits)."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        # JSON has no literal for these; encode as strings.
        return json.dumps(str(x))
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "inf" not in text:
        text += ".0"
    return text


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    close = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + close + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[" + sep.join(items) + close + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 0) -> str:
    """JSON text with every real printed to 17 significant digits."""
    return _encode(obj, indent, 0)


def csv_text(rows: list[dict]) -> str:
    """RFC 4180 CSV with a header row taken from the first row's keys."""
    if not rows:
        return ""
    buf = io.StringIO()
    header = list(rows[0].keys())
    for r in rows[1:]:
        header.extend(k for k in r if k not in header)
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\r\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (_fmt_float(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in r.items()})
    return buf.getvalue()
