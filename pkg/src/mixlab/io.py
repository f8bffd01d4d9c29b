"""Deterministic serialization: canonical JSON, CSV tables, atomic writes."""

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from fractions import Fraction

import numpy as np

__all__ = [
    "to_jsonable",
    "dumps",
    "config_hash",
    "csv_text",
    "atomic_write",
    "write_json",
    "write_csv",
    "read_report",
    "verify_report",
]


def to_jsonable(obj):
    """Plain JSON types; NaN and infinities become None."""
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, Fraction):
        return str(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(obj, indent=2):
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=indent, allow_nan=False) + "\n"


def config_hash(config):
    """sha256 of the canonical compact JSON of ``config``."""
    text = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def atomic_write(path, text):
    """Write through a temporary file in the same directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, obj):
    return atomic_write(path, dumps(obj))


def write_csv(path, header, rows):
    return atomic_write(path, csv_text(header, rows))


def read_report(path):
    with open(path) as fh:
        return json.load(fh)


def verify_report(report):
    """True when the embedded ``config_hash`` matches the embedded config."""
    if not isinstance(report, dict):
        report = read_report(report)
    return config_hash(report["config"]) == report["config_hash"]
