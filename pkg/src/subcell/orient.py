"""Sobel gradients, orientation choice and adaptive oriented stencils."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfinementError
from .grid import EPS_SINGULAR, CellGrid
from .models import Orientation, Stencil


@dataclass(frozen=True)
class NumericalGradient:
    H: float
    V: float


_K = np.array([1.0, 2.0, 1.0])
_D = np.array([-1.0, 0.0, 1.0])


def sobel(grid: CellGrid, cell) -> NumericalGradient:
    """3x3 Sobel differences; ``H`` across x, ``V`` across y (periodic)."""
    i, j = cell
    w = grid.window(i, j, [-1, 0, 1], [-1, 0, 1])  # w[di+1, dj+1]
    H = float(_D @ w @ _K)
    V = float(_K @ w @ _D)
    return NumericalGradient(H, V)


def sobel_all(averages):
    """Vectorized Sobel over a whole periodic grid: arrays ``(H, V)``."""
    a = np.asarray(averages, dtype=float)

    def sh(di, dj):
        return np.roll(np.roll(a, -di, axis=0), -dj, axis=1)

    H = 2 * sh(1, 0) + sh(1, 1) + sh(1, -1) - (2 * sh(-1, 0) + sh(-1, 1) + sh(-1, -1))
    V = 2 * sh(0, 1) + sh(1, 1) + sh(-1, 1) - (2 * sh(0, -1) + sh(1, -1) + sh(-1, -1))
    return H, V


def select_orientation(g: NumericalGradient) -> Orientation:
    """Four-way rule; ``|V| == |H|`` goes to the graph-over-x cases."""
    if abs(g.V) >= abs(g.H):
        return Orientation.Y_LEQ if g.V <= 0 else Orientation.Y_GEQ
    return Orientation.X_LEQ if g.H <= 0 else Orientation.X_GEQ


def frame_window(grid: CellGrid, cell, orientation: Orientation, cols, rows):
    """Averages ``W[a, b]`` at frame cells (cols[a], rows[b]) around ``cell``."""
    i, j = cell
    A, B = np.meshgrid(np.asarray(cols), np.asarray(rows), indexing="ij")
    di, dj = orientation.cell_offset(A, B)
    return grid.averages[(i + di) % grid.l, (j + dj) % grid.l]


def adaptive_stencil(grid: CellGrid, cell, orientation: Orientation, k: int, l_max=None, eps=EPS_SINGULAR):
    """Smallest-height oriented stencil whose bounding rows are clean.

    For each horizontal placement ``k_minus + k_plus = 2k`` the lower extent
    is the least ``l >= 1`` such that frame row ``-l-1`` is all full, the
    upper extent the least ``l >= 1`` such that row ``l+1`` is all empty.
    Raises :class:`ConfinementError` when no placement succeeds within
    ``l_max`` (default ``k + 4``).
    """
    if l_max is None:
        l_max = k + 4
    cols = np.arange(-2 * k, 2 * k + 1)
    rows = np.arange(-l_max - 1, l_max + 2)
    W = frame_window(grid, cell, orientation, cols, rows)
    full = W >= 1.0 - eps
    empty = W <= eps
    best = None
    for km in range(0, 2 * k + 1):
        sel = slice(2 * k - km, 2 * k - km + 2 * k + 1)
        rows_full = np.all(full[sel], axis=0)
        rows_empty = np.all(empty[sel], axis=0)
        lm = _first(rows_full, rows, lambda l: -l - 1, l_max)
        lp = _first(rows_empty, rows, lambda l: l + 1, l_max)
        if lm is None or lp is None:
            continue
        key = (1 + lm + lp, abs(km - k), km)
        if best is None or key < best[0]:
            best = (key, km, lm, lp)
    if best is None:
        raise ConfinementError(f"no confining {2 * k + 1}-wide stencil at cell {tuple(cell)}")
    _, km, lm, lp = best
    return Stencil(tuple(cell), km, 2 * k - km, lm, lp, orientation)


def _first(flags, rows, row_of, l_max):
    offset = -rows[0]
    for l in range(1, l_max + 1):
        if flags[row_of(l) + offset]:
            return l
    return None
