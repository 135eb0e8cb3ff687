"""Whole-grid reconstruction, global L1 errors, convergence and timing studies."""
from __future__ import annotations

import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .aeros import aeros_fit
from .elvira import elvira_fit
from .errors import ConfinementError, NumericDegeneracyError
from .grid import EPS_SINGULAR, CellGrid, classify_singular, rasterize
from .models import Constant, cell_rect, l1_shape_distance, square_stencil
from .obera import FitConfig, LossConfig, obera_fit
from .shapes import periodic
from .vertex import AGGREGATION_LOSS, aeros_vertex_fit, aggregate, tem_fit

METHODS = (
    "piecewise-constant",
    "linear-obera",
    "linear-obera-w",
    "elvira",
    "elvira-w-oriented",
    "quadratic-obera-non-adaptive",
    "quadratic-aero",
    "quartic-aero",
    "aero-qelvira-vertex",
)


@dataclass(frozen=True)
class MethodSpec:
    name: str
    options: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        if self.name not in METHODS:
            raise ValueError(f"unknown method {self.name!r}; choose from {', '.join(METHODS)}")


@dataclass
class CellRecord:
    model: object
    stencil: object
    method: str
    loss: float | None
    seconds: float
    fallback: str | None = None


@dataclass
class Reconstruction:
    grid: CellGrid
    spec: MethodSpec
    records: dict
    eps: float = EPS_SINGULAR

    def model_at(self, i, j):
        rec = self.records.get((i, j))
        return rec.model if rec is not None else Constant(float(self.grid[i, j]))

    @property
    def fallbacks(self):
        return {c: r.fallback for c, r in self.records.items() if r.fallback}


# --------------------------------------------------------------------------
# per-cell fits
# --------------------------------------------------------------------------


def _elvira(grid, cell, oriented):
    m, v, _ = elvira_fit(grid, cell, oriented=oriented)
    return m, square_stencil(*cell), v


def _aeros_chain(grid, cell, k):
    """AEROS degree 2k with fallbacks quartic -> quadratic -> oriented ELVIRA."""
    notes = []
    for kk in range(k, 0, -1):
        try:
            m, diag = aeros_fit(grid, cell, kk)
            return m, diag.stencil, None, ("; ".join(notes) or None)
        except ConfinementError:
            notes.append(f"degree {2 * kk} unconfined")
    m, st, v = _elvira(grid, cell, True)
    return m, st, v, "; ".join(notes + ["elvira-w-oriented"])


def _fit_cell(grid, cell, spec):
    name = spec.name
    if name == "piecewise-constant":
        return Constant(float(grid[cell])), None, None, None
    if name == "elvira":
        return (*_elvira(grid, cell, False), None)
    if name == "elvira-w-oriented":
        return (*_elvira(grid, cell, True), None)
    if name in ("linear-obera", "linear-obera-w"):
        lc = LossConfig("L1", 1.0) if name == "linear-obera" else LossConfig("L2", 100.0)
        res = obera_fit(grid, cell, FitConfig("linear", lc, tol=spec.options.get("tol", 1e-10)))
        return res.model, square_stencil(*cell), res.loss, None if res.converged else "not converged"
    if name == "quadratic-obera-non-adaptive":
        init = None
        try:
            init, _ = aeros_fit(grid, cell, 1)
        except ConfinementError:
            pass
        res = obera_fit(grid, cell, FitConfig("quadratic", LossConfig("L2", 100.0), tol=spec.options.get("tol", 1e-10)), init)
        return res.model, square_stencil(*cell), res.loss, None if res.converged else "not converged"
    if name == "quadratic-aero":
        return _aeros_chain(grid, cell, 1)
    if name == "quartic-aero":
        return _aeros_chain(grid, cell, 2)
    raise ValueError(name)


def _fit_many(args):
    grid, cells, spec = args
    out = {}
    for cell in cells:
        t0 = time.perf_counter()
        try:
            model, st, loss, note = _fit_cell(grid, cell, spec)
            tag = spec.name
        except (NumericDegeneracyError, ArithmeticError, ValueError) as exc:
            model, st, loss, note = Constant(float(grid[cell])), None, math.inf, f"failed: {exc}"
            tag = "piecewise-constant"
        out[cell] = CellRecord(model, st, tag, loss, time.perf_counter() - t0, note)
    return out


def _run(grid, cells, spec, workers):
    if workers <= 1 or len(cells) < 2 * workers:
        return _fit_many((grid, cells, spec))
    chunks = [cells[k::workers] for k in range(workers)]
    out = {}
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for part in ex.map(_fit_many, [(grid, c, spec) for c in chunks]):
            out.update(part)
    return out


def _vertex_pass(grid, cells, base):
    out = {}
    for cell in cells:
        t0 = time.perf_counter()
        first = base[cell]
        methods = [
            (first.method, lambda g, c, r=first: r.model),
            ("tem", lambda g, c: tem_fit(g, c, base)),
            ("aeros-vertex", lambda g, c: aeros_vertex_fit(g, c)),
        ]
        best = aggregate(grid, cell, methods, AGGREGATION_LOSS)
        st = first.stencil if best.model is first.model else square_stencil(*cell)
        out[cell] = CellRecord(best.model, st, best.tag, best.loss, first.seconds + time.perf_counter() - t0, first.fallback)
    return out


def _base_pass(grid, cells):
    out = {}
    for cell in cells:
        t0 = time.perf_counter()
        stencils = {}

        def aero_q(g, c):
            m, diag = aeros_fit(g, c, 1)
            stencils[id(m)] = diag.stencil
            return m

        best = aggregate(grid, cell, [("elvira-w-oriented", lambda g, c: elvira_fit(g, c, oriented=True)[0]), ("quadratic-aero", aero_q)])
        st = stencils.get(id(best.model), square_stencil(*cell))
        note = None if math.isfinite(best.loss) else "all base fits failed"
        out[cell] = CellRecord(best.model, st, best.tag, best.loss, time.perf_counter() - t0, note)
    return out


def reconstruct(grid: CellGrid, spec, workers: int = 1, eps: float = EPS_SINGULAR) -> Reconstruction:
    """Fit every singular cell with ``spec``; regular cells stay constant."""
    if isinstance(spec, str):
        spec = MethodSpec(spec)
    cells = classify_singular(grid, eps)
    if spec.name == "aero-qelvira-vertex":
        base = _base_pass(grid, cells)
        records = _vertex_pass(grid, cells, base)
    else:
        records = _run(grid, cells, spec, workers)
    return Reconstruction(grid, spec, records, eps)


# --------------------------------------------------------------------------
# errors and studies
# --------------------------------------------------------------------------


def cell_errors(rec: Reconstruction, truth, tol=1e-15):
    """Per-cell L1 errors ``||chi - u~||_{L1(T)}`` as an l x l array."""
    grid = rec.grid
    l, h = grid.l, grid.h
    shp = periodic(truth)
    exact = rasterize(truth, l).averages
    err = h * h * (exact * (1.0 - grid.averages) + (1.0 - exact) * grid.averages)
    for (i, j), r in rec.records.items():
        rect = cell_rect(i, j, h)
        if isinstance(r.model, Constant):
            c = r.model.value
            err[i, j] = h * h * (exact[i, j] * (1.0 - c) + (1.0 - exact[i, j]) * c)
        else:
            err[i, j] = l1_shape_distance(shp, r.model, rect, tol)
    return err


def global_l1_error(rec: Reconstruction, truth, tol=1e-15) -> float:
    return float(math.fsum(cell_errors(rec, truth, tol).ravel()))


@dataclass
class ConvergenceResult:
    method: str
    resolutions: list
    errors: list
    rate: float
    fit_resolutions: list


def fit_rate(resolutions, errors, min_resolution=30):
    """Least-squares slope of log(error) against log(h) over ``1/h >= min_resolution``."""
    pairs = [(l, e) for l, e in zip(resolutions, errors) if l >= min_resolution and e > 0]
    if len(pairs) < 2:
        raise ValueError("need at least two resolutions in the fit range")
    x = np.log([1.0 / l for l, _ in pairs])
    y = np.log([e for _, e in pairs])
    return float(np.polyfit(x, y, 1)[0]), [l for l, _ in pairs]


def convergence_study(truth, spec, resolutions, min_resolution=30, workers=1, tol=1e-15):
    if len(resolutions) < 3:
        raise ValueError("need at least three resolutions")
    if isinstance(spec, str):
        spec = MethodSpec(spec)
    errors = []
    for l in resolutions:
        grid = rasterize(truth, l)
        errors.append(global_l1_error(reconstruct(grid, spec, workers), truth, tol))
    rate, used = fit_rate(resolutions, errors, min_resolution)
    return ConvergenceResult(spec.name, list(resolutions), errors, rate, used)


def timing_study(truth, specs, l, repetitions):
    """Median per-singular-cell fit time (seconds) for each method."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    grid = rasterize(truth, l)
    out = {}
    for spec in specs:
        if isinstance(spec, str):
            spec = MethodSpec(spec)
        times = []
        for _ in range(repetitions):
            rec = reconstruct(grid, spec, workers=1)
            times += [r.seconds for r in rec.records.values()]
        out[spec.name] = statistics.median(times)
    return out
