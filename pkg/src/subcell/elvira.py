"""Candidate-based line fits: 6-candidate ELVIRA and its 3-candidate oriented variant.

All work happens in an orientation frame on the 3x3 block, where the
inside is ``w <= c + s u`` and cells are unit squares centred at integers.
"""
from __future__ import annotations

import math

import numpy as np

from . import geometry as geo
from .grid import CellGrid
from .models import Orientation, linear_from_frame
from .obera import LossConfig, grid_loss
from .orient import frame_window, select_orientation, sobel

_A, _B = np.meshgrid([-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], indexing="ij")
_U0, _U1 = (_A - 0.5).ravel(), (_A + 0.5).ravel()
_W0, _W1 = (_B - 0.5).ravel(), (_B + 0.5).ravel()
_ANCHOR = 4  # (a, b) = (0, 0) in the raveled 3x3 block


def offset_for_area(area, s):
    """Intercept ``c`` such that ``{w <= c + s u}`` covers ``area`` of the unit
    square ``[-1/2, 1/2]^2`` (closed-form inverse of the area map)."""
    area = min(1.0, max(0.0, float(area)))
    if area > 0.5:
        return -offset_for_area(1.0 - area, s)
    m = abs(s)
    if m == 0.0:
        return area - 0.5
    tri = 0.5 * min(m, 1.0 / m)
    if area <= tri:
        return math.sqrt(2.0 * m * area) - 0.5 - 0.5 * m
    if m <= 1.0:
        return area - 0.5
    return (area - 0.5) * m


def frame_slopes(W):
    """Three slope estimates from the column sums of a 3x3 frame block."""
    y = W.sum(axis=1)
    return (y[1] - y[0], 0.5 * (y[2] - y[0]), y[2] - y[1])


def frame_loss(c, s, W, cfg: LossConfig):
    vals = geo.linear_graph_area(c, s, _U0, _U1, _W0, _W1)
    r = W.ravel() - vals
    r = np.abs(r) if cfg.norm == "L1" else r * r
    return float(r.sum() + (cfg.K - 1.0) * r[_ANCHOR])


def frame_line_candidates(grid: CellGrid, cell, orientation: Orientation, cfg=LossConfig("L2", 1.0)):
    """``(c, s, loss)`` for the three slope estimates in one frame."""
    W = frame_window(grid, cell, orientation, [-1, 0, 1], [-1, 0, 1])
    A = W[1, 1]
    out = []
    for s in frame_slopes(W):
        c = offset_for_area(A, s)
        out.append((c, s, frame_loss(c, s, W, cfg)))
    return out


def branch_orientations(grid: CellGrid, cell):
    """Frames for the graph-over-x and graph-over-y branches (side from Sobel signs)."""
    g = sobel(grid, cell)
    vert = Orientation.Y_LEQ if g.V <= 0 else Orientation.Y_GEQ
    horiz = Orientation.X_LEQ if g.H <= 0 else Orientation.X_GEQ
    return vert, horiz


def elvira_candidates(grid: CellGrid, cell, orientation=None):
    """Anchor-consistent candidate lines: 6 without orientation, else 3."""
    frames = branch_orientations(grid, cell) if orientation is None else (Orientation(orientation),)
    center = grid.cell_center(*cell)
    out = []
    for o in frames:
        W = frame_window(grid, cell, o, [-1, 0, 1], [-1, 0, 1])
        for s in frame_slopes(W):
            out.append(linear_from_frame(o, offset_for_area(W[1, 1], s), s, center, grid.h))
    return out


def elvira_select(grid: CellGrid, cell, candidates, cfg: LossConfig):
    """Minimal-loss candidate on the 3x3 block; ties keep the earliest."""
    if not candidates:
        raise ValueError("no candidates")
    best, best_loss = None, math.inf
    for m in candidates:
        v = grid_loss(grid, cell, m, cfg)
        if v < best_loss:
            best, best_loss = m, v
    if best is None:
        best, best_loss = candidates[0], math.inf
    return best, best_loss


def elvira_fit(grid: CellGrid, cell, oriented=False, cfg=None):
    """Fast path: candidate generation and selection in the frame.

    ``oriented=False`` is classic ELVIRA (6 candidates, l2, K=1);
    ``oriented=True`` is the Sobel-oriented variant (3 candidates, K=100).
    Returns ``(Linear, loss, n_candidates)``.
    """
    if cfg is None:
        cfg = LossConfig("L2", 100.0 if oriented else 1.0)
    if oriented:
        frames = (select_orientation(sobel(grid, cell)),)
    else:
        frames = branch_orientations(grid, cell)
    best = None
    n = 0
    for o in frames:
        W = frame_window(grid, cell, o, [-1, 0, 1], [-1, 0, 1])
        A = W[1, 1]
        for s in frame_slopes(W):
            c = offset_for_area(A, s)
            v = frame_loss(c, s, W, cfg)
            n += 1
            if best is None or v < best[0]:
                best = (v, o, c, s)
    v, o, c, s = best
    return linear_from_frame(o, c, s, grid.cell_center(*cell), grid.h), v, n
