"""
JSON and CSV output.

JSON documents keep the key order of each `to_dict`, print floats with 17
significant digits and write infinities as the strings "inf" and "-inf", so
that identical results give byte-identical documents.
"""

import csv
import json
import math
from enum import Enum
from typing import Any, Iterable, List, Sequence, TextIO

import numpy as np

_SPECIAL = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def _float(value: float) -> str:
    if math.isnan(value):
        return '"nan"'
    if math.isinf(value):
        return '"inf"' if value > 0 else '"-inf"'
    return format(value, ".17g")


def to_plain(obj: Any) -> Any:
    """
    Replaces result objects, numpy values, enums and complex numbers by
    plain python containers and scalars
    """
    if hasattr(obj, "to_dict"):
        return to_plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(i) for i in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(i, (dict, list)) for i in obj):
            return "[" + ", ".join(_encode(i, indent, level) for i in obj) + "]"
        return "[" + pad + ("," + pad).join(_encode(i, indent, level + 1) for i in obj) + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(str(obj))


def dumps(obj: Any, indent: int = 2) -> str:
    "deterministic JSON text of a result object or plain container"
    return _encode(to_plain(obj), indent, 0) + "\n"


def _restore(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _restore(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_restore(i) for i in obj]
    if isinstance(obj, str) and obj in _SPECIAL:
        return _SPECIAL[obj]
    return obj


def loads(text: str) -> Any:
    "parses a document written by dumps, turning \"inf\" strings back into floats"
    return _restore(json.loads(text))


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """
    Writes a header and rows; floats use the same formatting as dumps.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        cells: List[Any] = []
        for value in row:
            value = to_plain(value)
            cells.append(_float(value).strip('"') if isinstance(value, float) else value)
        writer.writerow(cells)
