"""Text documents for models, configs, and results.

Documents are JSON with every float printed at 17 significant digits, which
is enough for binary64 values to round-trip bit-exactly through decimal.
Reading is plain ``json.loads``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path


def format_float(x: float) -> str:
    """Decimal text for a float that parses back to the identical bits."""
    if math.isnan(x) or math.isinf(x):
        raise ValueError("documents only hold finite numbers")
    text = format(float(x), ".17g")
    # ".17g" may emit a bare integer form; keep it valid JSON either way
    return text


def dumps(obj, indent: int = 0) -> str:
    """Serialize nested dicts/lists/scalars to JSON with 17-digit floats."""
    pieces: list[str] = []
    _emit(obj, pieces, indent, 0)
    return "".join(pieces)


def _emit(obj, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1)) if indent else ""
    close_pad = " " * (indent * level) if indent else ""
    nl = "\n" if indent else ""
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{" + nl)
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"document keys must be strings, got {key!r}")
            out.append(pad + json.dumps(key) + ": ")
            _emit(value, out, indent, level + 1)
            if i < len(obj) - 1:
                out.append(",")
            out.append(nl)
        out.append(close_pad + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            out.append("[]")
            return
        out.append("[" + nl)
        for i, value in enumerate(obj):
            out.append(pad)
            _emit(value, out, indent, level + 1)
            if i < len(obj) - 1:
                out.append(",")
            out.append(nl)
        out.append(close_pad + "]")
    else:
        # numpy scalars and arrays arrive here; convert and recurse
        if hasattr(obj, "tolist"):
            _emit(obj.tolist(), out, indent, level)
        else:
            raise TypeError(f"cannot serialize {type(obj).__name__}")


def write(path, obj, indent: int = 1) -> None:
    Path(path).write_text(dumps(obj, indent=indent) + "\n", encoding="utf-8")


def read(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
