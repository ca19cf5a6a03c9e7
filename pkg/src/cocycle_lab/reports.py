"""Delimited and JSON report writers with a fixed deterministic format.

CSV output follows RFC 4180 (CRLF line endings, UTF-8, '.' decimal
separator) and prints reals with 17 significant digits, so identical runs
produce byte-identical files.  JSON output is sorted and indented.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

__all__ = [
    "format_real",
    "write_csv",
    "write_json",
    "dump_spectrum",
    "dump_green_profile",
    "write_junit",
]


def format_real(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if math.isnan(f):
        return "nan"
    if math.isinf(f):
        return "inf" if f > 0 else "-inf"
    return format(f, ".17g")


def write_csv(path, rows: Sequence[dict], header: Optional[Sequence[str]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if header is None:
        header = list(rows[0].keys()) if rows else []
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [format_real(row[k]) if _is_number(row[k]) else str(row[k]) for k in header]
            )
    return path


def _is_number(v) -> bool:
    return isinstance(v, (int, float, bool, np.integer, np.floating, np.bool_))


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and (math.isnan(v) or math.isinf(v)):
        return str(v)
    return v


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path


def dump_spectrum(path, decomposition) -> Path:
    """Spectral dump: columns (j, E_j, residual)."""
    rows = []
    res = decomposition.residuals
    for j, e in enumerate(decomposition.eigenvalues, start=1):
        rows.append(
            {
                "j": j,
                "E_j": float(e),
                "residual": float(res[j - 1]) if res is not None else math.nan,
            }
        )
    return write_csv(path, rows, header=["j", "E_j", "residual"])


def dump_green_profile(path, entries: Iterable[tuple[int, int, int, float]]) -> Path:
    """Green-function profile dump: columns (m, n, sign, log_abs)."""
    rows = [
        {"m": m, "n": n, "sign": s, "log_abs": float(l)} for (m, n, s, l) in entries
    ]
    return write_csv(path, rows, header=["m", "n", "sign", "log_abs"])


def write_junit(path, suite_name: str, results: Sequence) -> Path:
    """JUnit-style XML for check results carrying (name, passed, detail).

    Wall-clock times are deliberately omitted so identical (suite, seed)
    runs produce byte-identical results files; timings go to stdout.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    failures = sum(0 if r.passed else 1 for r in results)
    lines = ['<?xml version="1.0" encoding="UTF-8"?>']
    lines.append(
        f'<testsuite name="{escape(suite_name)}" tests="{len(results)}" '
        f'failures="{failures}">'
    )
    for r in results:
        lines.append(f'  <testcase name="{escape(r.name)}">')
        lines.append(f"    <system-out>{escape(r.detail)}</system-out>")
        if not r.passed:
            lines.append(f'    <failure message="{escape(r.detail)}"/>')
        lines.append("  </testcase>")
    lines.append("</testsuite>")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
