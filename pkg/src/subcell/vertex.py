"""Corner recovery (AEROS-Vertex, tangent extension) and loss-based aggregation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfinementError, NumericDegeneracyError
from .grid import CellGrid
from .models import (
    TWO_PI,
    Constant,
    Corner,
    Linear,
    OrientedPoly,
    Stencil,
    corner_from_frame,
    linear_from_frame,
    square_stencil,
)
from .obera import LossConfig, grid_loss
from .orient import frame_window, select_orientation, sobel

AGGREGATION_LOSS = LossConfig("L2", 100.0)
# competing models are scored on a 5x5 block: on 3x3 blocks a kinked graph
# can match a gently curved interface's nine averages exactly
AGGREGATION_HALF_WIDTH = 2
VERTEX_L_MAX = 6
# breakpoint must lie within the anchor cell's frame column; admitting the
# neighbouring columns lets kinks beat curved fits on smooth data
VERTEX_REACH = 0.5


def _agg_loss(grid, cell, model, cfg):
    return grid_loss(grid, cell, model, cfg, square_stencil(*cell, AGGREGATION_HALF_WIDTH))


# --------------------------------------------------------------------------
# AEROS-Vertex
# --------------------------------------------------------------------------


def _solve_left_single(m, tol=1e-12):
    """Breakpoint in column 1 of four unit columns centred at t = 0..3.

    Column 0 lies on the left line, columns 2 and 3 on the right line.
    Returns ``(t_star, y_star, s_left, s_right)`` tuples.
    """
    m0, m1, m2, m3 = m
    s2 = m3 - m2
    l2 = lambda t: m2 + s2 * (t - 2.0)
    e = 0.5  # left edge of column 1
    A = m0 - l2(0.0)
    R = m1 - l2(1.0)
    if abs(A) <= tol and abs(R) <= tol:
        # collinear columns: a straight line, reported as a zero-kink corner
        return [(1.0, l2(1.0), s2, s2)]
    disc = 4.0 * R * (A + R)
    if disc < 0.0:
        return []
    out = []
    sq = math.sqrt(disc)
    for delta in (2.0 * (-(A + 2.0 * R) + sq), 2.0 * (-(A + 2.0 * R) - sq)):
        if abs(delta) <= tol:
            continue
        d0 = A + 0.5 * delta
        v = -d0 / delta
        if not -1e-12 <= v <= 1.0 + 1e-12:
            continue
        t = e + min(1.0, max(0.0, v))
        out.append((t, l2(t), s2 + delta, s2))
    return out


def _vertex_hypotheses(means):
    """All interior-column breakpoint solutions for one 4-column placement."""
    sols = list(_solve_left_single(means))
    for t, y, sl, sr in _solve_left_single(means[::-1]):
        sols.append((3.0 - t, y, -sr, -sl))
    return sols


def _confining_rows(full, empty, rows, l_max):
    offset = -rows[0]
    lm = next((l for l in range(1, l_max + 1) if full[-l - 1 + offset]), None)
    lp = next((l for l in range(1, l_max + 1) if empty[l + 1 + offset]), None)
    return lm, lp


def aeros_vertex_fit(grid: CellGrid, cell, orientation=None, cfg=AGGREGATION_LOSS, eps=1e-12):
    """Admissible one-breakpoint graphs from 4-column oriented stencils.

    For each placement of four columns containing the anchor and each
    interior breakpoint column, the four column means are solved in closed
    form for the two slopes and the breakpoint.  Returns a list of
    ``(Corner, loss)``; empty when nothing is admissible.
    """
    o = orientation or select_orientation(sobel(grid, cell))
    cols = np.arange(-3, 4)
    rows = np.arange(-VERTEX_L_MAX - 1, VERTEX_L_MAX + 2)
    W = frame_window(grid, cell, o, cols, rows)
    full = W >= 1.0 - eps
    empty = W <= eps
    center = grid.cell_center(*cell)
    h = grid.h
    out = []
    seen = set()
    for a0 in range(-3, 1):
        sel = slice(a0 + 3, a0 + 7)
        lm, lp = _confining_rows(np.all(full[sel], axis=0), np.all(empty[sel], axis=0), rows, VERTEX_L_MAX)
        if lm is None or lp is None:
            continue
        inner = slice(VERTEX_L_MAX + 1 - lm, VERTEX_L_MAX + 2 + lp)
        means = W[sel, inner].sum(axis=1) - lm - 0.5
        lo, hi = -lm - 0.5, lp + 0.5
        for t, y, sl, sr in _vertex_hypotheses(means):
            u = a0 + t
            if abs(u) > VERTEX_REACH:
                continue
            # graph must stay inside the stencil rows over the four columns
            ends = (y + sl * (a0 - 0.5 - u), y, y + sr * (a0 + 3.5 - u))
            if min(ends) < lo - 1e-9 or max(ends) > hi + 1e-9:
                continue
            key = (round(u, 12), round(y, 12), round(sl, 12), round(sr, 12))
            if key in seen:
                continue
            seen.add(key)
            model = corner_from_frame(o, (u, y), sl, sr, center, h)
            out.append((model, _agg_loss(grid, cell, model, cfg)))
    return out


# --------------------------------------------------------------------------
# tangent extension
# --------------------------------------------------------------------------


def tangent_line(model, point, h=None):
    """First-order expansion of a model's interface near ``point`` as a Linear.

    Linear models are their own tangent; oriented polynomials are expanded
    at the frame abscissa of ``point``.
    """
    if isinstance(model, Linear):
        return model
    if isinstance(model, OrientedPoly):
        xh = (point[0] - model.center[0]) / model.h
        yh = (point[1] - model.center[1]) / model.h
        u, _ = model.orientation.to_frame(xh, yh)
        q = model.q
        val = sum(c * u**k for k, c in enumerate(q))
        der = sum(k * c * u ** (k - 1) for k, c in enumerate(q) if k)
        return linear_from_frame(model.orientation, val - der * u, der, model.center, model.h)
    return None


def _line_point_dir(line: Linear):
    nx, ny = line.normal
    c = line.r + nx * line.center[0] + ny * line.center[1]
    return (c * nx, c * ny), (ny, -nx), (nx, ny, c)


def _in_halfplane(hp, p):
    nx, ny, c = hp
    return nx * p[0] + ny * p[1] <= c


def corner_from_tangents(t1: Linear, t2: Linear, toward1, toward2, max_dist):
    """Corner whose arms follow ``t1`` towards ``toward1`` and ``t2`` towards
    ``toward2``, or None when the lines are parallel, meet too far away, or
    their inside sides disagree."""
    p1, d1, hp1 = _line_point_dir(t1)
    p2, d2, hp2 = _line_point_dir(t2)
    det = d1[0] * (-d2[1]) - d1[1] * (-d2[0])
    if abs(det) < 1e-12:
        return None
    rx, ry = p2[0] - p1[0], p2[1] - p1[1]
    s = (rx * (-d2[1]) - ry * (-d2[0])) / det
    vx, vy = p1[0] + s * d1[0], p1[1] + s * d1[1]
    if math.hypot(vx - 0.5 * (toward1[0] + toward2[0]), vy - 0.5 * (toward1[1] + toward2[1])) > max_dist:
        return None
    # orient each arm from the vertex towards its neighbour
    if (toward1[0] - vx) * d1[0] + (toward1[1] - vy) * d1[1] < 0:
        d1 = (-d1[0], -d1[1])
    if (toward2[0] - vx) * d2[0] + (toward2[1] - vy) * d2[1] < 0:
        d2 = (-d2[0], -d2[1])
    probe = 1e-3
    d2_in_1 = _in_halfplane(hp1, (vx + probe * d2[0], vy + probe * d2[1]))
    d1_in_2 = _in_halfplane(hp2, (vx + probe * d1[0], vy + probe * d1[1]))
    if d2_in_1 != d1_in_2:
        return None
    a1 = math.atan2(d1[1], d1[0]) % TWO_PI
    a2 = math.atan2(d2[1], d2[0]) % TWO_PI
    c = Corner((vx, vy), a1, a2)
    want_convex = d2_in_1
    if c.convex != want_convex:
        c = Corner((vx, vy), a2, a1)
    return c


@dataclass
class BaseRecord:
    model: object
    stencil: Stencil


def tem_fit(grid: CellGrid, cell, base, radius=5, cfg=AGGREGATION_LOSS):
    """Tangent extension: intersect tangents borrowed from two neighbours.

    ``base`` maps singular cells ``(i, j)`` to objects with ``model`` and
    ``stencil`` attributes (a first-pass reconstruction).  Neighbours must be
    singular, within ``radius`` cells, and fitted on stencils that exclude
    ``cell``; the nearest one on each side of the cell's own tangent is
    used.  Returns ``(Corner, loss)`` or None.
    """
    l = grid.l
    h = grid.h
    i, j = cell
    own = base.get((i, j))
    if own is None:
        return None
    cx, cy = grid.cell_center(i, j)
    t_own = tangent_line(own.model, (cx, cy))
    if t_own is None:
        return None
    nx, ny = t_own.normal
    tx, ty = ny, -nx
    sides = {1: None, -1: None}
    for di in range(-radius, radius + 1):
        for dj in range(-radius, radius + 1):
            if di == 0 and dj == 0:
                continue
            rec = base.get(((i + di) % l, (j + dj) % l))
            if rec is None:
                continue
            if rec.stencil is not None and rec.stencil.contains_offset(-di, -dj):
                continue
            side = tx * di + ty * dj
            if side == 0:
                continue
            key = 1 if side > 0 else -1
            dist = math.hypot(di, dj)
            if sides[key] is None or dist < sides[key][0]:
                sides[key] = (dist, di, dj, rec)
    if sides[1] is None or sides[-1] is None:
        return None
    lines = []
    targets = []
    for key in (1, -1):
        _, di, dj, rec = sides[key]
        # neighbour model lives in its own (unwrapped) coordinates: shift it
        # next to this cell before expanding
        ni, nj = (i + di) % l, (j + dj) % l
        shift = ((i + di - ni) * h, (j + dj - nj) * h)
        model = rec.model.translated(*shift)
        ncx, ncy = cx + di * h, cy + dj * h
        mid = (0.5 * (cx + ncx), 0.5 * (cy + ncy))
        tl = tangent_line(model, mid)
        if tl is None:
            return None
        lines.append(tl)
        targets.append((ncx, ncy))
    corner = corner_from_tangents(lines[0], lines[1], targets[0], targets[1], max_dist=radius * h)
    if corner is None:
        return None
    vx, vy = corner.vertex
    if max(abs(vx - cx), abs(vy - cy)) > 1.5 * h:
        return None
    return corner, _agg_loss(grid, cell, corner, cfg)


# --------------------------------------------------------------------------
# aggregation
# --------------------------------------------------------------------------


@dataclass
class Candidate:
    model: object
    tag: str
    loss: float


def aggregate(grid: CellGrid, cell, method_list, cfg=AGGREGATION_LOSS):
    """Run each ``(tag, fn)`` and keep the minimal-loss model.

    ``fn(grid, cell)`` returns a model, a list of models, or
    ``(model, loss)`` pairs; exceptions and None count as failures.  Ties
    keep the earlier method.  When every method fails the anchor average is
    returned as a constant with infinite loss.
    """
    if not method_list:
        raise ValueError("method_list must not be empty")
    best = None
    for tag, fn in method_list:
        try:
            res = fn(grid, cell)
        except (ConfinementError, NumericDegeneracyError, ValueError, ArithmeticError):
            continue
        for model, value in _as_pairs(res):
            if value is None:
                value = _agg_loss(grid, cell, model, cfg)
            if best is None or value < best.loss:
                best = Candidate(model, tag, float(value))
    if best is None:
        return Candidate(Constant(float(grid[cell])), "piecewise-constant", math.inf)
    return best


def _as_pairs(res):
    if res is None:
        return []
    if isinstance(res, list):
        return [p if isinstance(p, tuple) else (p, None) for p in res]
    if isinstance(res, tuple):
        return [res]
    return [(res, None)]
