"""Sweep result table and its CSV / JSON serialization.

Column order is fixed by ``COLUMNS``; floats are written with 12 significant
digits, missing values as an empty CSV field or JSON ``null``.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import asdict, astuple, dataclass, fields
from pathlib import Path

FLOAT_FORMAT = "%.12g"


@dataclass(frozen=True)
class SweepRow:
    scheme: str  # NOMA | OMA
    combiner: str  # SC | MRC
    n_r: int
    n_d: int
    rho_db: float
    method: str  # closed-form | quadrature | monte-carlo
    c_s1: float | None = None
    c_s2: float | None = None
    c_sum: float | None = None
    p_out_s1: float | None = None
    p_out_s2: float | None = None
    se_c_s1: float | None = None
    se_c_s2: float | None = None
    se_c_sum: float | None = None
    se_p_out_s1: float | None = None
    se_p_out_s2: float | None = None
    seed: int | None = None
    trials: int | None = None


COLUMNS = tuple(f.name for f in fields(SweepRow))
HEADER = ",".join(COLUMNS)
_INT_COLUMNS = {"n_r", "n_d", "seed", "trials"}
_STR_COLUMNS = {"scheme", "combiner", "method"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return str(value)


def _round(value):
    if isinstance(value, float):
        return float(FLOAT_FORMAT % value)
    return value


def emit(rows, fmt: str = "csv") -> bytes:
    rows = list(rows)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([_fmt(v) for v in astuple(row)])
        return buf.getvalue().encode()
    if fmt == "json":
        payload = [{k: _round(v) for k, v in asdict(row).items()} for row in rows]
        return (json.dumps(payload, indent=1) + "\n").encode()
    raise ValueError(f"unknown output format {fmt!r}")


def _coerce(name: str, raw):
    if raw is None or raw == "":
        return None
    if name in _STR_COLUMNS:
        return str(raw)
    if name in _INT_COLUMNS:
        return int(raw)
    return float(raw)


def parse(data: bytes | str, fmt: str = "csv") -> list[SweepRow]:
    text = data.decode() if isinstance(data, bytes) else data
    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if tuple(header) != COLUMNS:
            raise ValueError(f"unexpected CSV header {header!r}")
        return [SweepRow(*(_coerce(n, v) for n, v in zip(COLUMNS, rec))) for rec in reader if rec]
    if fmt == "json":
        return [SweepRow(**{n: _coerce(n, obj.get(n)) for n in COLUMNS}) for obj in json.loads(text)]
    raise ValueError(f"unknown output format {fmt!r}")


def write(rows, path: str | Path | None, fmt: str = "csv") -> None:
    """Write to ``path`` or stdout when ``path`` is None or ``-``."""
    data = emit(rows, fmt)
    if path is None or str(path) == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror or exc}") from exc
