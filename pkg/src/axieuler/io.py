"""CSV and JSON file I/O.

Fields are written one node per row in row-major (z-fastest) order with
17 significant digits, so values survive a write/read cycle bit for bit.
All writers go through a temporary file and an atomic rename.
"""

from __future__ import annotations

import contextlib
import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .fields import CylGrid, ScalarField, VectorFieldRZ

SCALAR_HEADER = ("r", "z", "value")
VECTOR_HEADER = ("r", "z", "ur", "uz")


class FileFormatError(ValueError):
    """Malformed input file; the message names the file and row."""


def fmt(x) -> str:
    return "%.17g" % x


@contextlib.contextmanager
def atomic_write(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def write_rows(path, header, rows) -> None:
    with atomic_write(path) as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row) + "\n")


def _node_rows(grid: CylGrid, *arrays):
    R, Z = grid.mesh()
    cols = [R.ravel(), Z.ravel()] + [np.asarray(a).ravel() for a in arrays]
    return zip(*(c.tolist() for c in cols))


def write_scalar_field(path, field: ScalarField) -> None:
    write_rows(path, SCALAR_HEADER, _node_rows(field.grid, field.values))


def write_vector_field(path, field: VectorFieldRZ) -> None:
    write_rows(path, VECTOR_HEADER, _node_rows(field.grid, field.ur, field.uz))


def read_table(path, header) -> np.ndarray:
    """Numeric CSV with an exact header line; returns an (n, len(header)) array."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(f"{path}: cannot read ({exc.strerror})") from None
    reader = csv.reader(io.StringIO(text))
    first = next(reader, None)
    if first is None or tuple(c.strip() for c in first) != tuple(header):
        raise FileFormatError(f"{path}:1: expected header {','.join(header)!r}, got {','.join(first or [])!r}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise FileFormatError(f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise FileFormatError(f"{path}:{lineno}: non-numeric entry in {row!r}") from None
        if not all(np.isfinite(vals)):
            raise FileFormatError(f"{path}:{lineno}: non-finite entry in {row!r}")
        rows.append(vals)
    if not rows:
        raise FileFormatError(f"{path}: no data rows")
    return np.array(rows)


def _grid_from_nodes(path, r: np.ndarray, z: np.ndarray) -> CylGrid:
    ru, zu = np.unique(r), np.unique(z)
    nr, nz = ru.size, zu.size
    if nr < 2 or nz < 2 or nr * nz != r.size:
        raise FileFormatError(f"{path}: nodes do not form a full grid ({nr} r x {nz} z values, {r.size} rows)")
    hr = (ru[-1] - ru[0]) / (nr - 1)
    hz = (zu[-1] - zu[0]) / (nz - 1)
    grid = CylGrid(ru[-1] + 0.5 * hr, zu[0] - 0.5 * hz, zu[-1] + 0.5 * hz, nr, nz)
    R, Z = grid.mesh()
    scale = max(grid.r_max, abs(grid.z_min), abs(grid.z_max))
    bad = np.flatnonzero((np.abs(R.ravel() - r) > 1e-9 * scale) | (np.abs(Z.ravel() - z) > 1e-9 * scale))
    if bad.size:
        raise FileFormatError(f"{path}:{bad[0] + 2}: node ({r[bad[0]]}, {z[bad[0]]}) is off the "
                              "uniform cell-centred grid or out of row-major order")
    return grid


def read_scalar_field(path) -> ScalarField:
    data = read_table(path, SCALAR_HEADER)
    grid = _grid_from_nodes(path, data[:, 0], data[:, 1])
    return ScalarField(grid, data[:, 2])


def read_vector_field(path) -> VectorFieldRZ:
    data = read_table(path, VECTOR_HEADER)
    grid = _grid_from_nodes(path, data[:, 0], data[:, 1])
    return VectorFieldRZ(grid, data[:, 2], data[:, 3])


def read_targets(path) -> np.ndarray:
    return read_table(path, ("r", "z"))


def write_json(path, doc) -> None:
    with atomic_write(path) as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise FileFormatError(f"{path}: cannot read ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
