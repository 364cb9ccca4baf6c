"""CSV and JSON-lines readers/writers.

Floats are written with ``repr`` (shortest round-trip decimal) so every file
reads back to identical values.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .core import GridAssignment, PointCloud, ValidationError
from .topics import ActivityRecord, GridValues


class FileFormatError(ValidationError):
    """A malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, path=None, line=None):
        where = f"{path}:{line}: " if path is not None and line is not None else (f"{path}: " if path else "")
        super().__init__(where + message)
        self.path = path
        self.line = line


def _read_rows(path):
    with open(path, newline="") as fh:
        rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh))]
    rows = [(i, r) for i, r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise FileFormatError("empty file", path)
    return rows


def _id(text: str):
    return text.strip()


def _check_header(header, prefix, path, value_col=None):
    cols = [c.strip() for c in header]
    tail = cols[1:-1] if value_col else cols[1:]
    expected = [f"{prefix}{d}" for d in range(len(tail))]
    if not cols or cols[0] not in ("id", "topic_id") or not tail or tail != expected or (value_col and cols[-1] != value_col):
        raise FileFormatError(f"bad header {','.join(cols)!r}", path, 1)
    return len(tail)


def load_points(path) -> PointCloud:
    """``id,x0,x1[,x2]`` rows; row order is kept."""
    rows = _read_rows(path)
    k = _check_header(rows[0][1], "x", path)
    ids, coords, seen = [], [], set()
    for line, row in rows[1:]:
        if len(row) != k + 1:
            raise FileFormatError(f"expected {k + 1} fields, got {len(row)}", path, line)
        pid = _id(row[0])
        if pid in seen:
            raise FileFormatError(f"duplicate id {pid!r}", path, line)
        try:
            vals = [float(v) for v in row[1:]]
        except ValueError:
            raise FileFormatError(f"non-numeric coordinate in {row!r}", path, line) from None
        if not all(math.isfinite(v) for v in vals):
            raise FileFormatError(f"non-finite coordinate for {pid!r}", path, line)
        seen.add(pid)
        ids.append(pid)
        coords.append(vals)
    if not ids:
        raise FileFormatError("no points", path)
    return PointCloud(tuple(ids), np.array(coords, dtype=np.float64).reshape(len(ids), k))


def points_to_csv(cloud: PointCloud) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id"] + [f"x{d}" for d in range(cloud.k)])
    for pid, row in zip(cloud.ids, cloud.coords):
        w.writerow([pid] + [repr(float(v)) for v in row])
    return buf.getvalue()


def save_points(cloud: PointCloud, path) -> None:
    Path(path).write_text(points_to_csv(cloud))


def assignment_to_csv(assignment: GridAssignment) -> str:
    order = np.lexsort(assignment.cells.T[::-1]) if len(assignment.ids) else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id"] + [f"i{d}" for d in range(assignment.k)])
    for r in order:
        w.writerow([assignment.ids[r]] + [int(v) for v in assignment.cells[r]])
    return buf.getvalue()


def save_assignment(assignment: GridAssignment, path) -> None:
    """Rows sorted lexicographically by grid index."""
    Path(path).write_text(assignment_to_csv(assignment))


def load_assignment(path, extents=None) -> GridAssignment:
    """Read ``id,i0,i1[,i2]``; extents default to max index + 1 per dimension."""
    rows = _read_rows(path)
    k = _check_header(rows[0][1], "i", path)
    ids, cells, seen = [], [], set()
    for line, row in rows[1:]:
        if len(row) != k + 1:
            raise FileFormatError(f"expected {k + 1} fields, got {len(row)}", path, line)
        pid = _id(row[0])
        if pid in seen:
            raise FileFormatError(f"duplicate id {pid!r}", path, line)
        try:
            cell = [int(v) for v in row[1:]]
        except ValueError:
            raise FileFormatError(f"non-integer grid index in {row!r}", path, line) from None
        seen.add(pid)
        ids.append(pid)
        cells.append(cell)
    cells = np.array(cells, dtype=np.int64).reshape(len(ids), k)
    if extents is None:
        extents = tuple(int(v) + 1 for v in cells.max(axis=0)) if len(ids) else (0,) * k
    a = GridAssignment(tuple(ids), cells, tuple(extents))
    if not a.is_bijective():
        raise FileFormatError("assignment is not a bijection onto the "
                              + "x".join(map(str, a.extents)) + " grid", path)
    return a


def load_activities(path) -> list:
    """JSON lines: ``{"entity", "ts", "doc_id", "relevance"}``."""
    out, topics = [], None
    with open(path) as fh:
        for line, text in enumerate(fh, 1):
            if not text.strip():
                continue
            try:
                rec = ActivityRecord.from_dict(json.loads(text))
            except (ValueError, KeyError, TypeError) as exc:
                raise FileFormatError(f"bad activity record: {exc}", path, line) from None
            if topics is None:
                topics = len(rec.relevance)
            elif len(rec.relevance) != topics:
                raise FileFormatError(f"{len(rec.relevance)} topics, expected {topics}", path, line)
            out.append(rec)
    return out


def save_activities(records, path) -> None:
    Path(path).write_text("".join(r.to_json() + "\n" for r in records))


def grid_values_to_csv(gv: GridValues) -> str:
    a = gv.assignment
    order = np.lexsort(a.cells.T[::-1])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["topic_id"] + [f"i{d}" for d in range(a.k)] + ["value"])
    for r in order:
        pid = a.ids[r]
        w.writerow([pid] + [int(v) for v in a.cells[r]] + [repr(float(gv.values[pid]))])
    return buf.getvalue()


def save_grid_values(gv: GridValues, path) -> None:
    Path(path).write_text(grid_values_to_csv(gv))


def load_grid_values(path, kind="risk") -> GridValues:
    rows = _read_rows(path)
    k = _check_header(rows[0][1], "i", path, value_col="value")
    ids, cells, vals = [], [], {}
    for line, row in rows[1:]:
        if len(row) != k + 2:
            raise FileFormatError(f"expected {k + 2} fields, got {len(row)}", path, line)
        try:
            cell = [int(v) for v in row[1:-1]]
            value = float(row[-1])
        except ValueError:
            raise FileFormatError(f"bad row {row!r}", path, line) from None
        pid = _id(row[0])
        if pid in vals:
            raise FileFormatError(f"duplicate topic {pid!r}", path, line)
        ids.append(pid)
        cells.append(cell)
        vals[pid] = value
    cells = np.array(cells, dtype=np.int64).reshape(len(ids), k)
    a = GridAssignment(tuple(ids), cells, tuple(int(v) + 1 for v in cells.max(axis=0)))
    if not a.is_bijective():
        raise FileFormatError("grid values do not form a bijective placement", path)
    return GridValues(a, vals, kind)


def curtain_to_csv(matrix: np.ndarray, steps=None) -> str:
    """Header row is the 1-D topic indices; an optional leading ``step`` column."""
    matrix = np.asarray(matrix, dtype=np.float64)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = [str(x) for x in range(matrix.shape[1])]
    w.writerow((["step"] if steps is not None else []) + header)
    for i, row in enumerate(matrix):
        lead = [_step_text(steps[i])] if steps is not None else []
        w.writerow(lead + [repr(float(v)) for v in row])
    return buf.getvalue()


def _step_text(s) -> str:
    return s.isoformat().replace("+00:00", "Z") if hasattr(s, "isoformat") else str(s)


def save_curtain(matrix, path, steps=None) -> None:
    Path(path).write_text(curtain_to_csv(matrix, steps))


def load_curtain(path):
    """Returns ``(matrix, steps)``; ``steps`` is None when the file has no step column."""
    rows = _read_rows(path)
    header = [c.strip() for c in rows[0][1]]
    has_step = header[:1] == ["step"]
    cols = header[1:] if has_step else header
    if cols != [str(x) for x in range(len(cols))]:
        raise FileFormatError("curtain header must list topic indices 0..T-1", path, 1)
    steps, data = [], []
    for line, row in rows[1:]:
        if len(row) != len(header):
            raise FileFormatError(f"expected {len(header)} fields, got {len(row)}", path, line)
        try:
            data.append([float(v) for v in (row[1:] if has_step else row)])
        except ValueError:
            raise FileFormatError(f"bad row {row!r}", path, line) from None
        if has_step:
            steps.append(row[0])
    return np.array(data, dtype=np.float64).reshape(len(data), len(cols)), (steps if has_step else None)


def sniff(path) -> str:
    """Classify a CSV by its header: points, assignment, grid, curtain or bench."""
    with open(path, newline="") as fh:
        header = next(csv.reader(fh), [])
    cols = [c.strip() for c in header]
    if cols[:1] == ["layout"]:
        return "bench"
    if cols[:1] == ["topic_id"]:
        return "grid"
    if cols[:2] == ["id", "x0"]:
        return "points"
    if cols[:2] == ["id", "i0"]:
        return "assignment"
    if cols[:1] == ["step"] or cols[:1] == ["0"]:
        return "curtain"
    raise FileFormatError(f"unrecognised CSV header {','.join(cols)!r}", path, 1)
