"""Deterministic JSON and CSV artifacts.

Floats are written with 17 significant digits so they round-trip exactly;
non-finite values become ``null``.  Key order is insertion order, which every
producer in this package fixes.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

TOOL = "fucikwave"


def fmt_float(x: float) -> str:
    return "%.17g" % x


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return fmt_float(x) if math.isfinite(x) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return json.dumps(obj.value)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in seq):
            return "[" + ", ".join(_encode(x, indent, level + 1) for x in seq) + "]"
        items = [pad + _encode(x, indent, level + 1) for x in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2) -> str:
    return _encode(obj, indent, 0) + "\n"


def envelope(command, config, seed, result):
    from . import __version__

    return {"tool": TOOL, "version": __version__, "command": command, "seed": seed,
            "config": config, "result": result}


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return fmt_float(float(x)) if math.isfinite(float(x)) else "nan"
    if hasattr(x, "value") and isinstance(x.value, str):
        return x.value
    return str(x)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])
    return path


def curve_rows(curve):
    return [(p.r, p.a_hat, p.a, p.b, p.residual, p.flag) for p in curve.points]


CURVE_HEADER = ("r", "a_hat", "a", "b", "residual", "flag")
