"""Optimization-based fits (OBERA) and the loss functions shared by all methods."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .grid import CellGrid
from .models import (
    TWO_PI,
    Linear,
    OrientedPoly,
    Stencil,
    square_stencil,
    stencil_averages,
    stencil_data,
    support,
)
from .orient import select_orientation, sobel


@dataclass(frozen=True)
class LossConfig:
    norm: str = "L2"
    K: float = 1.0

    def __post_init__(self):
        if self.norm not in ("L1", "L2"):
            raise ValueError(f"norm must be 'L1' or 'L2', got {self.norm!r}")
        if not self.K >= 1.0:
            raise ValueError("consistency weight K must be >= 1")


L2_WEIGHTED = LossConfig("L2", 100.0)


def anchor_index(stencil: Stencil):
    return stencil.offsets().index((0, 0))


def residual_loss(residual, anchor, cfg: LossConfig):
    """Weighted l1/l2 loss of a residual vector; weight ``K`` on ``anchor``."""
    r = np.abs(np.asarray(residual, dtype=float))
    if cfg.norm == "L2":
        r = r * r
    return float(r.sum() + (cfg.K - 1.0) * r[anchor])


def loss(target, model, stencil: Stencil, cfg: LossConfig, h: float):
    """``sum_T w_T |a_T(target) - a_T(model)|^p`` over the stencil cells."""
    target = np.asarray(target, dtype=float)
    vals = stencil_averages(model, stencil, h)
    if vals.shape != target.shape:
        raise ValueError("target length does not match the stencil")
    return residual_loss(target - vals, anchor_index(stencil), cfg)


def grid_loss(grid: CellGrid, cell, model, cfg: LossConfig, stencil=None):
    """Loss of ``model`` against the grid on ``stencil`` (3x3 by default)."""
    st = stencil or square_stencil(*cell)
    return loss(stencil_data(grid, st), model, st, cfg, grid.h)


@dataclass(frozen=True)
class FitConfig:
    family: str = "linear"
    loss: LossConfig = LossConfig("L2", 1.0)
    tol: float = 1e-10
    max_iter: int = 2000
    init: str = "sobel-angle"

    def __post_init__(self):
        if self.family not in ("linear", "quadratic"):
            raise ValueError(f"unsupported family {self.family!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass
class FitResult:
    model: object
    loss: float
    converged: bool
    iterations: int
    evaluations: int
    seconds: float
    history: list = field(default_factory=list)


def anchor_matched_offset(theta, a_anchor, h):
    """Offset ``r`` of the line with angle ``theta`` whose anchor-cell average is ``a_anchor``."""
    R = support(theta)
    lo, hi = -R * h, R * h

    def f(r):
        return Linear(theta, r, (0.0, 0.0)).cell_average((-h / 2, h / 2, -h / 2, h / 2)) - a_anchor

    if f(lo) >= 0.0:
        return lo
    if f(hi) <= 0.0:
        return hi
    return optimize.brentq(f, lo, hi, xtol=1e-15 * h)


def sobel_angle(grid, cell):
    g = sobel(grid, cell)
    if g.H == 0.0 and g.V == 0.0:
        return 0.0
    return math.atan2(g.H, -g.V) % TWO_PI


def _simplex(x0, step):
    x0 = np.asarray(x0, dtype=float)
    pts = [x0]
    for k in range(len(x0)):
        e = x0.copy()
        e[k] += step[k]
        pts.append(e)
    return np.array(pts)


def _minimize(fun, x0, step, cfg: FitConfig):
    history = []
    best = [math.inf]
    nfev = [0]

    def f(x):
        nfev[0] += 1
        v = fun(x)
        if v < best[0]:
            best[0] = v
        return v

    def cb(xk):
        history.append(best[0])

    res = optimize.minimize(
        f,
        np.asarray(x0, dtype=float),
        method="Nelder-Mead",
        callback=cb,
        options={
            "initial_simplex": _simplex(x0, step),
            "xatol": cfg.tol,
            "fatol": 1e-24,
            "maxiter": cfg.max_iter,
            "maxfev": 4 * cfg.max_iter,
        },
    )
    return res, history, nfev[0]


def obera_fit(grid: CellGrid, cell, cfg: FitConfig = FitConfig(), init_model=None) -> FitResult:
    """Derivative-free minimization of the stencil loss over a family.

    Linear fits search ``(theta, r/h)``; quadratic fits search the three
    local coefficients of an oriented parabola whose orientation comes from
    the Sobel rule.  Parameters violating the family restriction score
    ``+inf``.  ``init_model`` overrides the default starting point.
    """
    t0 = time.perf_counter()
    i, j = cell
    h = grid.h
    st = square_stencil(i, j)
    target = stencil_data(grid, st)
    anchor = anchor_index(st)
    rects = np.array(st.rects(h))
    center = grid.cell_center(i, j)
    a_anchor = float(grid[i, j])

    if cfg.family == "linear":
        if isinstance(init_model, Linear):
            x0 = (init_model.theta, init_model.r / h)
        else:
            th = sobel_angle(grid, cell)
            x0 = (th, anchor_matched_offset(th, a_anchor, h) / h)

        def fun(x):
            th, rh = x
            if abs(rh) >= support(th):
                return math.inf
            vals = Linear(th, rh * h, center).cell_averages(rects)
            return residual_loss(target - vals, anchor, cfg.loss)

        res, hist, nfev = _minimize(fun, x0, (0.1, 0.1), cfg)
        th, rh = res.x
        model = Linear(float(th) % TWO_PI, float(rh) * h, center)
    else:
        if isinstance(init_model, OrientedPoly):
            orient = init_model.orientation
            c = list(init_model.coeffs) + [0.0] * 3
            x0 = c[:3]
        else:
            orient = select_orientation(sobel(grid, cell))
            x0 = _quadratic_start(grid, cell, orient)

        def fun(x):
            m = OrientedPoly(orient, tuple(x), center, h)
            vals = np.array([m.cell_average(tuple(r)) for r in rects])
            if not 0.0 < vals[anchor] < 1.0:
                return math.inf
            return residual_loss(target - vals, anchor, cfg.loss)

        res, hist, nfev = _minimize(fun, x0, (0.1, 0.1, 0.1), cfg)
        model = OrientedPoly(orient, tuple(float(v) for v in res.x), center, h)
    return FitResult(
        model=model,
        loss=float(res.fun),
        converged=bool(res.success),
        iterations=int(res.nit),
        evaluations=nfev,
        seconds=time.perf_counter() - t0,
        history=hist,
    )


def _quadratic_start(grid, cell, orient):
    """Zero-curvature start from the oriented ELVIRA line."""
    from .elvira import frame_line_candidates

    cands = frame_line_candidates(grid, cell, orient)
    c, s, _ = min(cands, key=lambda t: t[2])
    p0 = orient.sign * c
    p1 = orient.sign * s
    return [p0, p1, 0.0]


def lvira(grid: CellGrid, cell) -> FitResult:
    """Linear family, 3x3 stencil, unweighted l2 loss."""
    return obera_fit(grid, cell, FitConfig("linear", LossConfig("L2", 1.0)))
