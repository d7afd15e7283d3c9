"""CSV/JSON artifact helpers.

Matrix files are CSV with one realization per row (N rows, d columns),
optionally with a header row. All writes are atomic (temp file in the
target directory, then rename) so partial artifacts never appear.
"""

import csv
import hashlib
import json
import os
import tempfile

import numpy as np


def read_matrix(path, transpose=False):
    """Read a CSV matrix as (d, N): realization-per-row on disk, column-major
    in memory. ``transpose`` flags sources stored one realization per column."""
    with open(path, newline="") as fh:
        sniff = fh.readline()
        has_header = any(tok.strip() and not _floatable(tok)
                         for tok in sniff.replace(";", ",").split(","))
    data = np.loadtxt(path, delimiter=",", skiprows=1 if has_header else 0, ndmin=2)
    return data if transpose else data.T


def _floatable(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return False


def _atomic(path, writer, mode="w"):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, mode, newline="" if "b" not in mode else None) as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix(path, mat, header=None):
    """Write a (d, N) matrix as CSV, one realization per row."""
    mat = np.asarray(mat)

    def writer(fh):
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        for row in mat.T:
            w.writerow([f"{v:.17g}" for v in row])

    _atomic(path, writer)


def write_rows(path, rows, header=None):
    def writer(fh):
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        w.writerows(rows)

    _atomic(path, writer)


def write_json(path, obj):
    def writer(fh):
        json.dump(obj, fh, indent=2, sort_keys=True, default=_coerce)
        fh.write("\n")

    _atomic(path, writer)


def _coerce(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
