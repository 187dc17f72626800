"""Row tables written as CSV or JSON."""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Sequence, TextIO

BASE_COLUMNS = ("m_modes", "mu", "eta", "delta", "p_click_1", "fidelity_1")


def format_value(x: Any) -> str:
    """12 significant digits; scientific notation below 1e-4 in magnitude."""
    if x is None:
        return ""
    if isinstance(x, (bool, str)):
        return str(x)
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    return format(x, ".12g")


def quantize(x: float) -> float:
    """Round a parameter to exactly what the tables will print for it."""
    return float(format_value(x))


def _json_value(x: Any) -> Any:
    if x is None or isinstance(x, (bool, str, int)):
        return x
    text = format_value(x)
    return float(text)


def write_table(rows: Sequence[dict], columns: Sequence[str], fmt: str, stream: TextIO) -> None:
    if fmt == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c)) for c in columns])
    elif fmt == "json":
        payload = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        json.dump(payload, stream, indent=1)
        stream.write("\n")
    else:
        raise ValueError(f"unknown output format {fmt!r}")


def render_table(rows: Sequence[dict], columns: Sequence[str], fmt: str = "csv") -> str:
    buf = io.StringIO()
    write_table(rows, columns, fmt, buf)
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


def columns_for(extra: Iterable[str]) -> list[str]:
    return list(BASE_COLUMNS) + [c for c in extra if c not in BASE_COLUMNS]
