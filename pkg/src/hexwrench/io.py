"""File formats: sensor logs, wrench series and JSON documents.

CSV files are UTF-8 with LF line endings and a fixed header.  Floats are
written with ``repr`` so a read/write cycle reproduces the file byte for
byte.  Every log carries a ``<name>.json`` sidecar with its metadata.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .model import AXES, N_CHANNELS
from .simulation import SimLog

LOG_HEADER = ["t", *AXES, *(f"p{i:02d}" for i in range(1, N_CHANNELS + 1))]
WRENCH_HEADER = ["t", *AXES]
SCHEMA_VERSION = 1


class SchemaError(ValueError):
    def __init__(self, path, line, message):
        self.path, self.line = path, line
        where = f"{path}:{line}" if line else str(path)
        super().__init__(f"{where}: {message}")


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _read_rows(path, header, strict=True):
    """Parse a numeric CSV with the given header.

    In strict mode any bad row raises :class:`SchemaError`; otherwise bad
    cells become NaN and the offending line numbers are returned.
    """
    bad = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            got = next(reader)
        except StopIteration:
            raise SchemaError(path, 1, "empty file") from None
        if got != header:
            raise SchemaError(path, 1, f"expected header {','.join(header)}")
        data = []
        for lineno, row in enumerate(reader, start=2):
            vals = [math.nan] * len(header)
            problem = None
            if len(row) != len(header):
                problem = f"expected {len(header)} fields, got {len(row)}"
            else:
                for j, cell in enumerate(row):
                    try:
                        vals[j] = float(cell)
                    except ValueError:
                        problem = f"column {header[j]}: cannot parse {cell!r}"
                        break
            if problem:
                if strict:
                    raise SchemaError(path, lineno, problem)
                bad.append((lineno, problem))
                if len(row) == len(header):
                    vals = [_safe_float(c) for c in row]
            data.append(vals)
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    return arr, bad


def _safe_float(cell):
    try:
        return float(cell)
    except ValueError:
        return math.nan


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_log(log: SimLog, path) -> None:
    rows = np.column_stack([log.t, log.wrench, log.pressure])
    _write_rows(path, LOG_HEADER, rows)
    meta = {"schema_version": SCHEMA_VERSION, "kind": "simlog", **log.metadata}
    meta["schema_version"] = SCHEMA_VERSION
    write_json(meta, sidecar_path(path))


def read_log(path, strict=True) -> SimLog:
    """Read a sensor log; the sidecar is optional but must be a known version."""
    arr, bad = _read_rows(path, LOG_HEADER, strict)
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        meta = read_json(side)
        if meta.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError(side, 0, f"unsupported schema_version {meta.get('schema_version')!r}")
    if not strict:
        meta["bad_lines"] = bad
    if strict:
        _check_time(path, arr[:, 0])
    return SimLog(t=arr[:, 0], wrench=arr[:, 1:7], pressure=arr[:, 7:], metadata=meta)


def _check_time(path, t):
    if len(t) > 1:
        steps = np.diff(t)
        if np.any(steps <= 0):
            i = int(np.flatnonzero(steps <= 0)[0])
            raise SchemaError(path, i + 3, "time stamps must increase strictly")


def write_wrenches(t, wrench, path) -> None:
    _write_rows(path, WRENCH_HEADER, np.column_stack([t, wrench]))


def read_wrenches(path):
    """Return (t, wrench) from either a wrench CSV or a full sensor log."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\r\n").split(",")
    if first == LOG_HEADER:
        log = read_log(path)
        return log.t, log.wrench
    arr, _ = _read_rows(path, WRENCH_HEADER, strict=True)
    _check_time(path, arr[:, 0])
    return arr[:, 0], arr[:, 1:]


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(path, exc.lineno, exc.msg) from None


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")
