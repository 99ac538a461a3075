"""Bit-defined output formats: binary field dumps, text slices, CSV series.

Field dump layout (little-endian throughout):

    magic   4 bytes  b"DPFD"
    version u32      1
    dims    3 x u32  nodes per axis
    spacing 3 x f64  grid spacings
    time    f64      snapshot time
    ncomp   u32      reals per node (8 = 4 complex amplitudes)
    payload node-major f64: for each node (C-order x,y,z) the 8 reals
            re(psi1), im(psi1), ..., re(psi4), im(psi4)

Text slices are row-major whitespace-separated reals with '#' comment
headers; all floats are printed with %.17g so re-import is bit-identical.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import BispinorField, PositionGrid

MAGIC = b"DPFD"
VERSION = 1
_HEADER = struct.Struct("<4sI3I3ddI")

FMT = "%.17g"


def write_field_dump(path, field: BispinorField) -> None:
    nx, ny, nz = field.grid.shape
    header = _HEADER.pack(MAGIC, VERSION, nx, ny, nz,
                          *field.grid.spacing, field.time, 8)
    # node-major: (nx, ny, nz, 4) complex viewed as (..., 8) little-endian
    payload = np.ascontiguousarray(
        np.moveaxis(field.values, 0, -1)).view(np.float64)
    payload = payload.astype("<f8", copy=False)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def read_field_dump(path) -> BispinorField:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        magic, version, nx, ny, nz, dx, dy, dz, time, ncomp = \
            _HEADER.unpack(raw)
        if magic != MAGIC:
            raise ValueError(f"{path}: not a field dump (magic {magic!r})")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        if ncomp != 8:
            raise ValueError(f"{path}: expected 8 reals per node, "
                             f"got {ncomp}")
        count = nx * ny * nz * ncomp
        payload = np.frombuffer(fh.read(count * 8), dtype="<f8",
                                count=count)
    values = payload.astype(np.float64).view(np.complex128)
    values = np.moveaxis(values.reshape(nx, ny, nz, 4), -1, 0)
    grid = PositionGrid((nx, ny, nz), (dx, dy, dz))
    return BispinorField(grid, values.copy(), time)


def format_float(x: float) -> str:
    return FMT % x


def export_slice(path, matrix: np.ndarray, header_lines) -> None:
    """Write a 2D real matrix with comment header, deterministic text."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise ValueError("slice export needs a 2D matrix")
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for row in matrix:
            fh.write(" ".join(FMT % v for v in row))
            fh.write("\n")


def read_slice(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(tok) for tok in line.split()])
    return np.array(rows, dtype=float)


def write_csv(path, columns: dict) -> None:
    """Column-dict CSV with deterministic %.17g formatting."""
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    n = len(arrays[0])
    if any(len(a) != n for a in arrays):
        raise ValueError("columns must share a length")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(FMT % a[i] for a in arrays) + "\n")


def read_csv(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        names = fh.readline().strip().split(",")
        data = [[] for _ in names]
        for line in fh:
            line = line.strip()
            if not line:
                continue
            for slot, tok in zip(data, line.split(",")):
                slot.append(float(tok))
    return {n: np.array(v) for n, v in zip(names, data)}


def slice_indices(grid: PositionGrid, plane: str, value: float):
    """Nearest grid plane for 'x'|'y'|'z' = value; raises when outside."""
    axis = {"x": 0, "y": 1, "z": 2}[plane]
    coords = grid.axis(axis)
    if value < coords[0] - 0.5 * grid.spacing[axis] or \
            value > coords[-1] + 0.5 * grid.spacing[axis]:
        raise ValueError(
            f"plane {plane}={value} outside grid range "
            f"[{coords[0]}, {coords[-1]}]")
    idx = int(np.argmin(np.abs(coords - value)))
    return axis, idx


def take_plane(array3d: np.ndarray, axis: int, idx: int) -> np.ndarray:
    return np.take(array3d, idx, axis=axis)


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
