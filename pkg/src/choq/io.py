"""Serialization of grids and reports.

Grid sets and grid functions have one documented JSON form:

    {"n": 2, "root": {"level": 0, "coords": [0, 0]}, "finest_level": -3,
     "cells": [0, 5, 12]}                       # grid set
    {"n": ..., "root": ..., "finest_level": ...,
     "values": [[index, value], ...]}           # grid function

Indices are row-major over the finest-level lattice inside the root; value
pairs are sorted by index and omit zeros.  `canonical_json` renders floats
with their shortest round-trip decimal, so identical objects always produce
identical bytes.
"""

from __future__ import annotations

import csv
import io as _io
import json
from typing import Any

import numpy as np

from .cubes import DyadicCube, GridFunction, GridSet
from .errors import SchemaError


def grid_to_dict(obj: GridSet | GridFunction) -> dict:
    base = {
        "n": obj.n,
        "root": {"level": obj.root.level, "coords": list(obj.root.coords)},
        "finest_level": obj.finest_level,
    }
    if isinstance(obj, GridSet):
        base["cells"] = [int(k) for k in obj.keys]
        return base
    flat = obj.values.ravel()
    nz = np.flatnonzero(flat != 0.0)
    if flat[nz].min(initial=0.0) < 0:
        raise SchemaError("serialized grid functions must be non-negative", field="values")
    base["values"] = [[int(k), float(flat[k])] for k in nz]
    return base


def _require(d: dict, field: str, kind, where: str = "grid"):
    if field not in d:
        raise SchemaError(f"missing in {where}", field=field)
    value = d[field]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise SchemaError("must be an integer", field=field)
    if kind is dict and not isinstance(value, dict):
        raise SchemaError("must be an object", field=field)
    if kind is list and not isinstance(value, list):
        raise SchemaError("must be an array", field=field)
    return value


def grid_from_dict(d: Any) -> GridSet | GridFunction:
    if not isinstance(d, dict):
        raise SchemaError("top-level value must be an object")
    n = _require(d, "n", int)
    root_d = _require(d, "root", dict)
    level = _require(root_d, "level", int, where="root")
    coords = _require(root_d, "coords", list, where="root")
    if len(coords) != n or not all(isinstance(c, int) and not isinstance(c, bool) for c in coords):
        raise SchemaError(f"must be {n} integers", field="coords")
    finest = _require(d, "finest_level", int)
    try:
        root = DyadicCube(level, tuple(coords))
        if finest >= level:
            raise SchemaError("must be strictly below the root level", field="finest_level")
        probe = GridSet.empty(root, finest)
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    total = probe.extent ** n

    has_cells = "cells" in d
    has_values = "values" in d
    if has_cells == has_values:
        raise SchemaError("need exactly one of 'cells' or 'values'", field="cells")

    if has_cells:
        cells = _require(d, "cells", list)
        keys = []
        for k in cells:
            if isinstance(k, bool) or not isinstance(k, int):
                raise SchemaError("indices must be integers", field="cells")
            if not 0 <= k < total:
                raise SchemaError(f"index {k} outside 0..{total - 1}", field="cells")
            keys.append(k)
        if len(set(keys)) != len(keys):
            raise SchemaError("duplicate index", field="cells")
        return GridSet(root, finest, np.asarray(keys, dtype=np.int64))

    pairs = _require(d, "values", list)
    flat = np.zeros(total)
    seen = set()
    for item in pairs:
        if not isinstance(item, list) or len(item) != 2:
            raise SchemaError("entries must be [index, value] pairs", field="values")
        k, v = item
        if isinstance(k, bool) or not isinstance(k, int):
            raise SchemaError("indices must be integers", field="values")
        if not 0 <= k < total:
            raise SchemaError(f"index {k} outside 0..{total - 1}", field="values")
        if k in seen:
            raise SchemaError(f"duplicate index {k}", field="values")
        seen.add(k)
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not np.isfinite(v):
            raise SchemaError("values must be finite numbers", field="values")
        if v < 0:
            raise SchemaError("values must be non-negative", field="values")
        flat[k] = float(v)
    return GridFunction(root, finest, flat.reshape((probe.extent,) * n))


def canonical_json(obj: Any) -> str:
    """Byte-stable JSON: sorted keys, no whitespace, shortest float repr."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def store_grid(obj: GridSet | GridFunction, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(grid_to_dict(obj)))


def load_grid(path) -> GridSet | GridFunction:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    return grid_from_dict(data)


def write_json(obj: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_json(obj))


def write_csv(rows: list, header: list[str], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def csv_text(rows: list, header: list[str]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()
