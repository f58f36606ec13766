"""Serialization of reports to deterministic JSON and CSV.

Exact values always travel as ``"p/q"`` strings. When a decimal rendering is
requested it is attached next to the exact string, never instead of it.
"""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .arith import ratio_str
from .bigfloat import BigFloat


def exact(r: Fraction, precision: Optional[int] = None):
    """``"p/q"``, or ``{"exact", "decimal", "precision_bits"}`` with a precision."""
    if precision is None:
        return ratio_str(r)
    return {"exact": ratio_str(r),
            "decimal": BigFloat.from_ratio(r, precision).decimal(),
            "precision_bits": precision}


def exact_list(values: Iterable[Fraction], precision: Optional[int] = None) -> list:
    return [exact(v, precision) for v in values]


def to_json(header: dict, body: dict) -> str:
    doc = {"header": header}
    doc.update(body)
    return json.dumps(doc, indent=2, ensure_ascii=True) + "\n"


def to_csv(header: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    """CSV with ``#``-prefixed header lines, then a column row, then data."""
    buf = io.StringIO()
    for line in json.dumps(header, indent=None, sort_keys=False).splitlines():
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow(["" if v is None else v for v in row])
    return buf.getvalue()
