"""Plain-text artefacts: CSV tables, JSON reports and Wigner grid files.

Every file carries the sha256 of the config that produced it.  Output is
byte-for-byte deterministic for a given config.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

from .states import WignerGrid

__all__ = ["config_hash", "to_jsonable", "write_json", "write_csv", "write_grid",
           "read_grid", "write_grid_csv"]


def config_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def to_jsonable(obj):
    """Recursively convert numpy/complex values; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(float(obj.real)), to_jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return obj


def write_json(path, payload: dict, chash: str):
    data = dict(to_jsonable(payload))
    data["config_hash"] = chash
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return Path(path)


def write_csv(path, header, rows, chash: str):
    buf = io.StringIO()
    buf.write(f"# config_hash={chash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")
    return Path(path)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_grid(path, grid: WignerGrid, chash: str):
    c = complex(grid.center)
    lines = [f"# wigner {grid.resolution} {grid.half_extent!r} {c.real!r} {c.imag!r}",
             f"# config {chash}"]
    for row in np.asarray(grid.values):
        lines.append(" ".join(f"{v:.12e}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return Path(path)


def write_grid_csv(path, grid: WignerGrid, chash: str):
    X, P = np.meshgrid(grid.xs, grid.ps)
    rows = zip(X.ravel(), P.ravel(), grid.values.ravel())
    return write_csv(path, ["x", "p", "W"], rows, chash)


def read_grid(path) -> WignerGrid:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    head = text[0].split()
    if head[:2] != ["#", "wigner"]:
        raise ValueError("not a wigner grid file")
    M, L, cr, ci = int(head[2]), float(head[3]), float(head[4]), float(head[5])
    rows = [ln for ln in text[1:] if ln and not ln.startswith("#")]
    values = np.array([[float(v) for v in ln.split()] for ln in rows])
    if values.shape != (M, M):
        raise ValueError(f"grid body has shape {values.shape}, header says {M}x{M}")
    return WignerGrid(complex(cr, ci), L, M, values)
