"""Deterministic text output: every float is serialized as %.12e.

Keeping one fixed float format across JSON summaries, resolved configs and
CSV diagnostics makes reruns byte-comparable and lets downstream tooling
match displayed scalars against the files verbatim.
"""

from __future__ import annotations

import numpy as np

FLOAT_FMT = "%.12e"


def fmt_float(x) -> str:
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return FLOAT_FMT % x


def dumps(obj, indent: int = 0) -> str:
    """JSON text with %.12e floats and stable key order."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for k, v in obj.items():
            items.append(f'{pad}  "{k}": {dumps(v, indent + 1)}')
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq)
        if flat:
            return "[" + ", ".join(dumps(v) for v in seq) + "]"
        items = [f"{pad}  {dumps(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        # strict JSON has no literal for non-finite floats
        if not np.isfinite(float(obj)):
            return "null"
        return fmt_float(obj)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    raise TypeError(f"cannot serialize {type(obj)!r}")


def dumps_compact(obj) -> str:
    """Single-line JSON with %.12e floats, for NDJSON streams."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f'"{k}": {dumps_compact(v)}' for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps_compact(v) for v in obj) + "]"
    return dumps(obj)


def dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(obj))
        f.write("\n")


def write_csv(path, header: list[str], columns: list[np.ndarray]) -> None:
    """CSV with a header row; all values formatted %.12e."""
    n = len(columns[0])
    for col in columns:
        if len(col) != n:
            raise ValueError("csv columns must have equal length")
    with open(path, "w", encoding="utf-8") as f:
        f.write(",".join(header) + "\n")
        for i in range(n):
            f.write(",".join(fmt_float(col[i]) for col in columns) + "\n")


def read_csv(path) -> tuple[list[str], dict[str, np.ndarray]]:
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    if not lines:
        raise ValueError(f"empty csv: {path}")
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    data = {h: np.array([float(r[j]) for r in rows]) for j, h in enumerate(header)}
    return header, data
