"""Plot-ready CSV output for region curves and asymptotic diagnostics."""

import csv
from pathlib import Path

import numpy as np

from .errors import InputFormatError

REGION_HEADER = ("scheme", "alpha", "R_d", "R_e", "on_frontier")
DIAGNOSTIC_HEADER = ("regime", "p_r", "alpha", "quantity", "value")


def fmt12(x):
    return format(float(x), ".12g")


def region_rows(curves):
    for curve in curves:
        for i in range(len(curve)):
            yield (curve.scheme, fmt12(curve.alpha[i]), fmt12(curve.r_d[i]),
                   fmt12(curve.r_e[i]), "1" if curve.frontier[i] else "0")


def _write(target, header, rows):
    """Write to a path, or to an already-open text stream."""
    if hasattr(target, "write"):
        writer = csv.writer(target, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(target, "w", encoding="utf-8", newline="") as fh:
        _write(fh, header, rows)


def write_region_csv(curves, path):
    _write(path, REGION_HEADER, region_rows(curves))


def write_diagnostic_csv(rows, path):
    """``rows`` are ``(regime, p_r, alpha, quantity, value)`` tuples."""
    _write(path, DIAGNOSTIC_HEADER,
           ((reg, fmt12(p), fmt12(a), q, fmt12(v)) for reg, p, a, q, v in rows))


def _read(path, header):
    path = Path(path)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            got = next(reader, None)
            if tuple(got or ()) != header:
                raise InputFormatError(f"{path}: expected header {','.join(header)}")
            return list(reader)
    except (OSError, UnicodeDecodeError) as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


def read_region_csv(path):
    """Parse a region CSV into ``{scheme: dict(alpha=..., r_d=..., r_e=..., frontier=...)}``."""
    out = {}
    for lineno, row in enumerate(_read(path, REGION_HEADER), start=2):
        if len(row) != 5 or row[4] not in ("0", "1"):
            raise InputFormatError(f"{path}:{lineno}: malformed row {row!r}")
        try:
            vals = [float(v) for v in row[1:4]]
        except ValueError as exc:
            raise InputFormatError(f"{path}:{lineno}: {exc}") from exc
        entry = out.setdefault(row[0], {"alpha": [], "r_d": [], "r_e": [], "frontier": []})
        entry["alpha"].append(vals[0])
        entry["r_d"].append(vals[1])
        entry["r_e"].append(vals[2])
        entry["frontier"].append(row[4] == "1")
    return {k: {f: np.array(v) for f, v in entry.items()} for k, entry in out.items()}


def read_diagnostic_csv(path):
    rows = []
    for lineno, row in enumerate(_read(path, DIAGNOSTIC_HEADER), start=2):
        if len(row) != 5:
            raise InputFormatError(f"{path}:{lineno}: malformed row {row!r}")
        try:
            rows.append((row[0], float(row[1]), float(row[2]), row[3], float(row[4])))
        except ValueError as exc:
            raise InputFormatError(f"{path}:{lineno}: {exc}") from exc
    return rows
