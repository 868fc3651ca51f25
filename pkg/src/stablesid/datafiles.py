"""Plain-text dataset files.

A dataset is comma-separated text with header ``t,u_1..u_m,y_1..y_d`` and
one row per sample.  Values are written with 17 significant digits so the
series round-trips bit-exactly.  Parse failures raise ParseError naming the
offending line and column.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .docio import format_float
from .exceptions import ParseError
from .ssmodel import Dataset


def write_dataset(path, data: Dataset) -> None:
    m, d = data.m, data.d
    header = (
        "t,"
        + ",".join(f"u_{j + 1}" for j in range(m))
        + ","
        + ",".join(f"y_{j + 1}" for j in range(d))
    )
    lines = [header]
    U, Y = data.U, data.Y
    for t in range(data.Tbar + 1):
        vals = [str(t)]
        vals += [format_float(U[j, t]) for j in range(m)]
        vals += [format_float(Y[j, t]) for j in range(d)]
        lines.append(",".join(vals))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_header(fields: list[str]) -> tuple[int, int]:
    if not fields or fields[0] != "t":
        raise ParseError("line 1, column 1: header must start with 't'")
    m = 0
    i = 1
    while i < len(fields) and fields[i] == f"u_{m + 1}":
        m += 1
        i += 1
    d = 0
    while i < len(fields) and fields[i] == f"y_{d + 1}":
        d += 1
        i += 1
    if m == 0 or d == 0 or i != len(fields):
        bad = i + 1 if i < len(fields) else len(fields)
        raise ParseError(
            f"line 1, column {bad}: header must be t,u_1..u_m,y_1..y_d"
        )
    return m, d


def read_dataset(path) -> Dataset:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise ParseError("line 1, column 1: empty dataset file")
    m, d = _parse_header(lines[1 - 1].split(","))
    width = 1 + m + d
    rows: list[list[float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != width:
            raise ParseError(
                f"line {lineno}, column {min(len(fields), width) + 1}: "
                f"expected {width} fields, got {len(fields)}"
            )
        try:
            t = int(fields[0])
        except ValueError as exc:
            raise ParseError(f"line {lineno}, column 1: bad sample index") from exc
        if t != len(rows):
            raise ParseError(
                f"line {lineno}, column 1: sample index {t}, expected {len(rows)}"
            )
        values = []
        for col, field in enumerate(fields[1:], start=2):
            try:
                values.append(float(field))
            except ValueError as exc:
                raise ParseError(
                    f"line {lineno}, column {col}: bad number {field!r}"
                ) from exc
        rows.append(values)
    if len(rows) < 2:
        raise ParseError("line 2, column 1: dataset needs at least 2 samples")
    table = np.asarray(rows, dtype=float).T
    return Dataset(U=table[:m], Y=table[m:])
