"""Oriented-stencil polynomial recovery (AEROS).

After the Sobel rule fixes a frame and the adaptive stencil confines the
interface, each stencil column sum is the mean of the interface graph over
that column (up to the stencil's base elevation).  The polynomial of degree
``2k`` with those column means is then a small linear solve.
"""
from __future__ import annotations

import functools
import time
from dataclasses import dataclass

import numpy as np

from .grid import CellGrid
from .models import OrientedPoly, Orientation, Stencil
from .orient import NumericalGradient, adaptive_stencil, frame_window, select_orientation, sobel


@dataclass(frozen=True)
class ColumnData:
    """Column sums of a stencil in frame units.

    ``means = sums + base`` are the averages of the interface graph over the
    unit columns ``[a - 1/2, a + 1/2]`` (frame coordinates, anchor at 0).
    """

    columns: np.ndarray
    sums: np.ndarray
    base: float
    h: float

    @property
    def means(self):
        return self.sums + self.base

    @property
    def world_averages(self):
        """Column averages ``h * sum`` in world units."""
        return self.h * self.sums


def column_averages(grid: CellGrid, stencil: Stencil) -> ColumnData:
    W = frame_window(grid, stencil.anchor, stencil.orientation, stencil.columns, stencil.rows)
    return ColumnData(stencil.columns.astype(float), W.sum(axis=1), stencil.base_local, grid.h)


def column_moments(columns, degree):
    """``M[a, n] = int_{a-1/2}^{a+1/2} u**n du``."""
    a = np.asarray(columns, dtype=float)[:, None]
    n = np.arange(degree + 1)[None, :]
    return ((a + 0.5) ** (n + 1) - (a - 0.5) ** (n + 1)) / (n + 1)


@functools.lru_cache(maxsize=64)
def _interp_inverse(columns):
    M = column_moments(columns, len(columns) - 1)
    return np.linalg.inv(M)


def average_interpolant(data, width=None):
    """Coefficients (low-to-high, frame units) of the degree ``width - 1``
    polynomial whose column means match ``data``.

    ``data`` is a :class:`ColumnData` or a pair ``(columns, means)``.
    """
    if isinstance(data, ColumnData):
        cols, means = data.columns, data.means
    else:
        cols, means = data
    cols = tuple(float(c) for c in cols)
    if width is not None and len(cols) != width:
        raise ValueError(f"expected {width} columns, got {len(cols)}")
    if len(set(cols)) != len(cols):
        raise ValueError("columns must be distinct")
    return _interp_inverse(cols) @ np.asarray(means, dtype=float)


@dataclass
class AerosDiagnostics:
    gradient: NumericalGradient
    orientation: Orientation
    stencil: Stencil
    seconds: float


def aeros_fit(grid: CellGrid, cell, k: int):
    """Degree-``2k`` oriented polynomial fit on the adaptive stencil.

    Raises :class:`~subcell.errors.ConfinementError` when no stencil confines
    the interface.
    """
    t0 = time.perf_counter()
    g = sobel(grid, cell)
    o = select_orientation(g)
    st = adaptive_stencil(grid, cell, o, k)
    q = average_interpolant(column_averages(grid, st))
    model = OrientedPoly(o, tuple(o.sign * q), grid.cell_center(*cell), grid.h)
    return model, AerosDiagnostics(g, o, st, time.perf_counter() - t0)
