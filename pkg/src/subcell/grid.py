"""Cell-average grids on the periodic unit square.

Cell ``(i, j)`` is ``[i h, (i+1) h] x [j h, (j+1) h]`` with ``h = 1/l``;
``averages[i, j]`` stores its volume fraction, so the first index runs
along x.  Indexing wraps in both directions.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .errors import InvalidShapeError
from .shapes import Shape, periodic

EPS_SINGULAR = 1e-12


@dataclass(frozen=True)
class CellGrid:
    l: int
    averages: np.ndarray

    def __post_init__(self):
        a = np.array(self.averages, dtype=float)
        if a.shape != (self.l, self.l):
            raise ValueError(f"averages must be {self.l}x{self.l}, got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "averages", a)

    @property
    def h(self):
        return 1.0 / self.l

    def __getitem__(self, ij):
        i, j = ij
        return self.averages[i % self.l, j % self.l]

    def window(self, i, j, di, dj):
        """Averages at offsets ``di`` x ``dj`` (1D integer arrays) around (i, j)."""
        ii = (i + np.asarray(di)) % self.l
        jj = (j + np.asarray(dj)) % self.l
        return self.averages[np.ix_(ii, jj)]

    def cell_rect(self, i, j):
        h = self.h
        return (i * h, (i + 1) * h, j * h, (j + 1) * h)

    def cell_center(self, i, j):
        h = self.h
        return ((i + 0.5) * h, (j + 0.5) * h)

    def with_averages(self, averages):
        return CellGrid(self.l, averages)


def rasterize(shape: Shape, l: int, tol: float = 1e-13) -> CellGrid:
    """Exact cell averages of ``shape`` (periodically wrapped) on an l x l grid.

    Cells the boundary cannot reach are resolved by a single center test;
    only cells near boundary samples get an exact area computation.
    ``tol`` bounds the absolute error of the few quadrature-based shapes.
    """
    if l < 1:
        raise ValueError("l must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    h = 1.0 / l
    shp = periodic(shape)
    xc = (np.arange(l) + 0.5) * h
    X, Y = np.meshgrid(xc, xc, indexing="ij")
    avg = shp.contains(X, Y).astype(float)

    # boundary samples at most h/4 apart: any cut cell holds a sample or
    # borders a cell that does
    pts = shp.boundary_samples(0.25 * h)
    idx = np.floor(np.mod(pts, 1.0) / h).astype(int) % l
    mark = np.zeros((l, l), dtype=bool)
    mark[idx[:, 0], idx[:, 1]] = True
    cand = mark.copy()
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            cand |= np.roll(np.roll(mark, di, axis=0), dj, axis=1)
    inv = h * h
    for i, j in zip(*np.nonzero(cand)):
        rect = (i * h, (i + 1) * h, j * h, (j + 1) * h)
        avg[i, j] = shp.area_in_polygon(geo.rect_polygon(*rect)) / inv
    np.clip(avg, 0.0, 1.0, out=avg)
    return CellGrid(l, avg)


def classify_singular(grid: CellGrid, eps: float = EPS_SINGULAR):
    """Cells with ``eps < a < 1 - eps`` as ``(i, j)`` tuples in row-major order."""
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 0.5)")
    a = grid.averages
    ii, jj = np.nonzero((a > eps) & (a < 1.0 - eps))
    return [(int(i), int(j)) for i, j in zip(ii, jj)]


def total_mass(grid: CellGrid) -> float:
    return float(math.fsum(grid.averages.ravel())) * grid.h * grid.h


def write_grid(grid: CellGrid, fh):
    """Header line of JSON, then ``l`` CSV rows; row ``j`` lists ``a[0..l-1, j]``."""
    fh.write(json.dumps({"l": grid.l, "format": "f64-row-major"}) + "\n")
    for j in range(grid.l):
        fh.write(",".join(repr(float(v)) for v in grid.averages[:, j]) + "\n")


def read_grid(fh) -> CellGrid:
    header = fh.readline()
    try:
        meta = json.loads(header)
    except json.JSONDecodeError as exc:
        raise ValueError(f"line 1: bad grid header: {exc.msg}") from exc
    if meta.get("format") != "f64-row-major" or not isinstance(meta.get("l"), int):
        raise ValueError("line 1: expected {'l': int, 'format': 'f64-row-major'}")
    l = meta["l"]
    rows = []
    for lineno, line in enumerate(fh, start=2):
        if not line.strip():
            continue
        try:
            vals = [float(v) for v in line.split(",")]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        if len(vals) != l:
            raise ValueError(f"line {lineno}: expected {l} values, got {len(vals)}")
        rows.append(vals)
    if len(rows) != l:
        raise ValueError(f"expected {l} data rows, got {len(rows)}")
    return CellGrid(l, np.array(rows).T)


def grid_to_string(grid: CellGrid) -> str:
    buf = io.StringIO()
    write_grid(grid, buf)
    return buf.getvalue()


def check_shape(shape):
    if not isinstance(shape, Shape):
        raise InvalidShapeError(f"not a shape: {shape!r}")
    return shape
