"""CSV / JSON / time-tag file helpers.

CSV files have one header row and SI columns.  Floats are written with
``repr`` so that a file round-trips exactly and identical runs produce
identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def read_csv(path):
    """Return ``(header, columns)`` with columns converted to float arrays where possible."""
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = list(r)
    cols = {}
    for j, name in enumerate(header):
        vals = [row[j] for row in rows]
        try:
            cols[name] = np.array([float(v) if v != "" else math.nan for v in vals])
        except ValueError:
            cols[name] = vals
    return header, cols


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, Path):
        return str(x)
    return x


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_timetags_binary(path, times):
    """Little-endian signed 64-bit integer picoseconds."""
    ps = np.round(np.asarray(times, dtype=float) * 1e12).astype("<i8")
    ps.tofile(path)


def read_timetags_binary(path):
    return np.fromfile(path, dtype="<i8").astype(float) * 1e-12


def write_timetags_csv(path, times):
    write_csv(path, ["time_s"], ([t] for t in np.asarray(times, dtype=float)))


def read_timetags_csv(path):
    return read_csv(path)[1]["time_s"]
