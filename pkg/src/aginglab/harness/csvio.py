"""Result rows and atomic CSV emission.

The schema is fixed: header exactly
``experiment,params,estimate,stderr,reference,n,wall_s``; UTF-8, LF line
endings, full round-trip float formatting.  Optional fields are empty, never
zero-filled.  Determinism comparisons use the canonical projection with the
wall-clock column blanked (wall time is honest, therefore not reproducible).
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass
from typing import Optional

HEADER = ["experiment", "params", "estimate", "stderr", "reference", "n", "wall_s"]


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    params: str
    estimate: float
    stderr: Optional[float] = None
    reference: Optional[float] = None
    n: Optional[int] = None
    wall_s: Optional[float] = None

    def __post_init__(self):
        if self.stderr is not None and self.stderr < 0:
            raise ValueError("stderr must be nonnegative")


def format_params(params: dict) -> str:
    """Canonical params field: sorted key=value pairs joined by ';'."""
    def fmt(v):
        return repr(v) if isinstance(v, float) else str(v)

    return ";".join(f"{k}={fmt(v)}" for k, v in sorted(params.items()))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows(path: str, rows) -> None:
    """Write rows atomically: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for row in rows:
        writer.writerow([
            row.experiment, row.params, _cell(row.estimate), _cell(row.stderr),
            _cell(row.reference), _cell(row.n), _cell(row.wall_s),
        ])
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".csv.tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_rows(path: str) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != HEADER:
            raise ValueError(f"unexpected CSV header {reader.fieldnames} (want {HEADER})")
        return list(reader)


def canonical_bytes(path: str) -> bytes:
    """CSV content with wall_s blanked, for byte-identity comparisons."""
    rows = read_rows(path)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for r in rows:
        writer.writerow([r[h] if h != "wall_s" else "" for h in HEADER])
    return buf.getvalue().encode("utf-8")
