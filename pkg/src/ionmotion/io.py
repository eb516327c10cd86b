"""CSV / JSON / config file formats.

CSV: UTF-8, one header row, floats as 17 significant digits, '\\n' line ends.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .constants import TWO_PI
from .errors import ParseError
from .scan import ScanResult

SCAN_HEADER = ("x", "p", "sigma")
DETUNING_HEADER = ("delta_rad_s", "p_f1")
TRAJECTORY_HEADER = ("t_s", "re_alpha", "im_alpha")


def fmt(v):
    return format(float(v), ".17g")


def format_csv(header, columns):
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header, columns):
    Path(path).write_bytes(format_csv(header, columns).encode("utf-8"))


def parse_csv(text, header=None, path=None):
    """Parse a numeric CSV; returns (header, list of float columns)."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].strip():
        raise ParseError("empty file, expected a header row", 1 if lines else None, path)
    got = tuple(h.strip() for h in lines[0].split(","))
    if header is not None and got != tuple(header):
        raise ParseError(f"expected header {','.join(header)!r}, got {lines[0]!r}", 1, path)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            raise ParseError("blank line", lineno, path)
        fields = line.split(",")
        if len(fields) != len(got):
            raise ParseError(f"expected {len(got)} fields, got {len(fields)}", lineno, path)
        try:
            row = [float(f) for f in fields]
        except ValueError:
            raise ParseError(f"non-numeric field in {line!r}", lineno, path) from None
        if not all(math.isfinite(v) for v in row):
            raise ParseError(f"non-finite value in {line!r}", lineno, path)
        rows.append(row)
    if not rows:
        raise ParseError("no data rows", 2, path)
    cols = [np.array(c) for c in zip(*rows)]
    return got, cols


def scan_to_csv(scan: ScanResult):
    """``x,p,sigma`` with x in Hz (cyclic); the library keeps rad/s."""
    return format_csv(SCAN_HEADER, (scan.x / TWO_PI, scan.p, scan.sigma))


def scan_from_csv(text, path=None):
    _, (x_hz, p, sigma) = parse_csv(text, SCAN_HEADER, path)
    try:
        return ScanResult(x_hz * TWO_PI, p, sigma, {"source": str(path) if path else None})
    except ValueError as exc:
        raise ParseError(str(exc), None, path) from None


def read_scan(path):
    return scan_from_csv(Path(path).read_text(encoding="utf-8"), path=str(path))


def write_scan(path, scan):
    Path(path).write_bytes(scan_to_csv(scan).encode("utf-8"))


def detuning_scan_to_csv(scan: ScanResult):
    return format_csv(DETUNING_HEADER, (scan.x, scan.p))


def trajectory_to_csv(t, alpha):
    alpha = np.asarray(alpha)
    return format_csv(TRAJECTORY_HEADER, (t, alpha.real, alpha.imag))


def parse_config(text, path=None):
    """Flat ``key = value`` config with ``#`` comments; values kept as strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw!r}", lineno, path)
        key, val = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParseError("empty key", lineno, path)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", lineno, path)
        out[key] = val
    return out


def read_config(path):
    return parse_config(Path(path).read_text(encoding="utf-8"), path=str(path))


def dumps_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
