"""
Structured JSON result documents.

Top-level fields, always in this order: ``schema_version``, ``generator``,
``config_echo``, ``results``, ``metadata``.  Floats are written with 17
significant digits and every physical number travels as
``{"value": x, "unit": u}``.  The timestamp lives in ``metadata`` so that two
runs of the same configuration compare equal with :func:`same_results`.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
import sys

import numpy as np

SCHEMA_VERSION = "1.0"


def quantity(value, unit):
    return {"value": float(value), "unit": unit}


def quantities(values, unit):
    return {"value": [float(v) for v in values], "unit": unit}


def document(generator, config_echo, results, timestamp=None):
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return {
        "schema_version": SCHEMA_VERSION,
        "generator": generator,
        "config_echo": config_echo,
        "results": results,
        "metadata": {"timestamp": timestamp},
    }


def _float(x):
    if not math.isfinite(x):
        return "null"
    return "%.17g" % x


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return {None: "null", True: "true", False: "false"}[None if obj is None else bool(obj)]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(doc, indent=2):
    """Serialize with insertion-ordered keys and %.17g floats."""
    return _encode(doc, indent, 0) + "\n"


def write(doc, path):
    text = dumps(doc)
    if path in (None, "", "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def load(path):
    with open(path) as fh:
        return json.load(fh)


def same_results(a, b):
    """Equality of two documents ignoring ``metadata``."""
    strip = lambda d: {k: v for k, v in d.items() if k != "metadata"}
    return strip(a) == strip(b)
