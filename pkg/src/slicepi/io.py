"""File formats shared with the command line.

Sampled functions: CSV with header ``polar_idx,azimuth_idx,t_idx,w,x,y,z``
preceded by one ``#`` line carrying the grid description as JSON, or a JSON
document ``{"grid": {...}, "values": [[p, a, k, w, x, y, z], ...]}``.
Slice functions: CSV ``t_idx,a_w,a_x,a_y,a_z,b_w,b_x,b_y,b_z`` with the same
kind of ``#`` line. Values are written with 17 significant digits so files
round-trip exactly.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from . import __version__
from .geometry import BoundaryGrid, CircleGrid, SampledFunction
from .slices import SliceFunction

SAMPLED_HEADER = ["polar_idx", "azimuth_idx", "t_idx", "w", "x", "y", "z"]
SLICE_HEADER = ["t_idx", "a_w", "a_x", "a_y", "a_z", "b_w", "b_x", "b_y", "b_z"]


class FormatError(ValueError):
    pass


def _num(v: float) -> str:
    return repr(float(v))


def grid_from_description(desc: dict) -> BoundaryGrid:
    try:
        return BoundaryGrid.build(int(desc["n_polar"]), int(desc["n_azimuth"]), int(desc["n_t"]), desc.get("rule", "angle"))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"incomplete grid description: {desc}") from exc


def _sampled_rows(phi: SampledFunction):
    rule = phi.grid.sphere
    n_t = phi.grid.circle.n
    for m in range(len(rule)):
        p, a = int(rule.polar_idx[m]), int(rule.azimuth_idx[m])
        for k in range(n_t):
            yield [p, a, k, *phi.values[m, k]]


def dumps_sampled(phi: SampledFunction, meta: dict | None = None) -> str:
    head = {**phi.grid.describe(), "version": __version__, **(meta or {})}
    buf = io.StringIO()
    buf.write("# " + json.dumps(head, sort_keys=True) + "\n")
    buf.write(",".join(SAMPLED_HEADER) + "\n")
    for row in _sampled_rows(phi):
        buf.write(",".join([str(v) for v in row[:3]] + [_num(v) for v in row[3:]]) + "\n")
    return buf.getvalue()


def dumps_sampled_json(phi: SampledFunction, meta: dict | None = None) -> str:
    head = {**phi.grid.describe(), "version": __version__, **(meta or {})}
    rows = [[*r[:3], *map(float, r[3:])] for r in _sampled_rows(phi)]
    return json.dumps({"grid": head, "values": rows}, sort_keys=True)


def _fill(grid: BoundaryGrid, rows) -> SampledFunction:
    values = np.full(grid.shape + (4,), np.nan)
    n_az = grid.sphere.n_azimuth
    for row in rows:
        if len(row) != 7:
            raise FormatError(f"expected 7 fields per row, got {len(row)}")
        p, a, k = (int(v) for v in row[:3])
        if not (0 <= p < grid.sphere.n_polar and 0 <= a < n_az and 0 <= k < grid.circle.n):
            raise FormatError(f"index out of range: {row[:3]}")
        values[p * n_az + a, k] = [float(v) for v in row[3:]]
    if np.isnan(values).any():
        raise FormatError("file does not cover the whole grid")
    return SampledFunction(grid, values)


def loads_sampled(text: str) -> SampledFunction:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
            return _fill(grid_from_description(doc["grid"]), doc["values"])
        except (json.JSONDecodeError, KeyError) as exc:
            raise FormatError(f"malformed JSON function file: {exc}") from exc
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise FormatError("missing '# {grid}' description line")
    try:
        desc = json.loads(lines[0][1:])
    except json.JSONDecodeError as exc:
        raise FormatError("grid description line is not JSON") from exc
    reader = csv.reader(lines[1:])
    header = next(reader, None)
    if header != SAMPLED_HEADER:
        raise FormatError(f"unexpected header {header}")
    try:
        return _fill(grid_from_description(desc), reader)
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(str(exc)) from exc


def dumps_slice(f: SliceFunction, meta: dict | None = None) -> str:
    head = {"n_t": f.circle.n, "version": __version__, **(meta or {})}
    buf = io.StringIO()
    buf.write("# " + json.dumps(head, sort_keys=True) + "\n")
    buf.write(",".join(SLICE_HEADER) + "\n")
    for k in range(f.circle.n):
        buf.write(",".join([str(k)] + [_num(v) for v in (*f.a[k], *f.b[k])]) + "\n")
    return buf.getvalue()


def loads_slice(text: str) -> SliceFunction:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise FormatError("missing '# {...}' description line")
    desc = json.loads(lines[0][1:])
    reader = csv.reader(lines[1:])
    if next(reader, None) != SLICE_HEADER:
        raise FormatError("unexpected slice header")
    n = int(desc["n_t"])
    a = np.full((n, 4), np.nan)
    b = np.full((n, 4), np.nan)
    for row in reader:
        k = int(row[0])
        vals = [float(v) for v in row[1:]]
        a[k], b[k] = vals[:4], vals[4:]
    if np.isnan(a).any() or np.isnan(b).any():
        raise FormatError("slice file does not cover the circle grid")
    return SliceFunction(CircleGrid(n), a, b)


def read_sampled(path) -> SampledFunction:
    return loads_sampled(Path(path).read_text())


def write_sampled(path, phi: SampledFunction, meta: dict | None = None):
    path = Path(path)
    text = dumps_sampled_json(phi, meta) if path.suffix == ".json" else dumps_sampled(phi, meta)
    path.write_text(text)
