"""Deterministic CSV and JSON rendering."""

from __future__ import annotations

import json
import math

import numpy as np


def format_number(v):
    """12 significant digits; scientific notation once the decimal exponent reaches 6 in magnitude."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if v == 0.0:
        return "0"
    sci = f"{v:.11e}"
    mant, exp = sci.split("e")
    exp = int(exp)
    if abs(exp) >= 6:
        mant = mant.rstrip("0").rstrip(".")
        return f"{mant}e{exp:+03d}"
    fixed = f"{v:.{max(11 - exp, 0)}f}"
    if "." in fixed:
        fixed = fixed.rstrip("0").rstrip(".")
    return fixed


def _csv_field(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return format_number(v)


def render_csv(columns, rows):
    lines = [",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(columns)}")
        lines.append(",".join(_csv_field(c) for c in row))
    return "\n".join(lines) + "\n"


def _json_value(v):
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return "null"
        return format(v, ".17g")
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def render_json(obj):
    """JSON with every float written to 17 significant digits (lossless round trip)."""
    return _json_value(obj) + "\n"


def table_records(columns, rows):
    return [dict(zip(columns, row)) for row in rows]
