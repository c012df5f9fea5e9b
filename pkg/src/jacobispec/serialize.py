"""Output files: CSV curves with JSON sidecars, JSON reports, atomic writes.

Floats are written with ``repr`` so that every value reads back exactly.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .reports import jsonable

__all__ = [
    "atomic_write_text",
    "write_json",
    "curve_csv",
    "write_curve",
    "read_curve",
    "sidecar_path",
    "run_metadata",
]


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to a temporary file in the target directory and rename
    it into place, so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(jsonable(obj), indent=2) + "\n")


def run_metadata(config: dict, **extra) -> dict:
    from . import __version__
    meta = {"package": "jacobispec", "version": __version__, "config": config}
    meta.update(extra)
    return jsonable(meta)


def _fmt(v) -> str:
    v = float(v)
    return repr(v)


def curve_csv(columns: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(columns))
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_curve(path, xs, values, metadata: Optional[dict] = None,
                columns: Sequence[str] = ("x", "value")) -> Path:
    """Write ``x,value`` rows plus a ``<path>.json`` sidecar with ``metadata``."""
    xs = np.asarray(xs, dtype=float).ravel()
    values = np.asarray(values, dtype=float).ravel()
    if xs.shape != values.shape:
        raise ValueError("xs and values must have the same length")
    atomic_write_text(path, curve_csv(columns, zip(xs, values)))
    side = sidecar_path(path)
    write_json(side, metadata or {})
    return side


def read_curve(path):
    """Return ``(columns, data)`` from a curve CSV; ``data`` is a 2-D array."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    return header, data.reshape(-1, len(header))
