import math

import numpy as np
import pytest
from scipy import integrate

from helpers import model_grid
from subcell.config import load_shape
from subcell.errors import ConfinementError
from subcell.grid import rasterize
from subcell.models import Constant, Corner, Linear, Orientation, cell_rect, corner_from_frame, l1_model_distance
from subcell.pipeline import reconstruct
from subcell.vertex import (
    _solve_left_single,
    aeros_vertex_fit,
    aggregate,
    corner_from_tangents,
    tangent_line,
    tem_fit,
)


def kinked_means(t_star, y_star, sl, sr):
    """Column means over [t-1/2, t+1/2], t = 0..3, of the kinked graph (quadrature)."""
    g = lambda t: y_star + (sl if t < t_star else sr) * (t - t_star)
    return [integrate.quad(g, t - 0.5, t + 0.5, points=[t_star] if abs(t - t_star) < 0.5 else None, epsabs=1e-15)[0] for t in range(4)]


@pytest.mark.parametrize("t_star,sl,sr", [(0.7, 0.8, -0.3), (1.2, -0.5, 0.4), (1.0, 1.5, 0.2), (0.55, 0.1, -1.2)])
def test_closed_form_breakpoint_solution(t_star, sl, sr):
    m = kinked_means(t_star, 0.3, sl, sr)
    sols = _solve_left_single(m)
    assert any(abs(t - t_star) < 1e-9 and abs(a - sl) < 1e-9 and abs(b - sr) < 1e-9 and abs(y - 0.3) < 1e-9 for t, y, a, b in sols)


def test_collinear_columns_give_zero_kink():
    (t, y, a, b), = _solve_left_single([0.0, 0.5, 1.0, 1.5])
    assert a == b == pytest.approx(0.5) and y == pytest.approx(0.5)


@pytest.mark.parametrize("o", list(Orientation))
def test_aeros_vertex_recovers_exact_corner(o):
    l, cell = 30, (15, 15)
    h = 1.0 / l
    center = (15.5 * h, 15.5 * h)
    truth = corner_from_frame(o, (0.1, 0.05), 0.9, -0.6, center, h)
    g = model_grid(truth, l)
    fits = aeros_vertex_fit(g, cell, o)
    best, v = min(fits, key=lambda p: p[1])
    assert v < 1e-20
    assert l1_model_distance(truth, best, cell_rect(*cell, h)) < 1e-12 * h * h


def test_aeros_vertex_rotated_right_angle():
    l, cell = 30, (15, 15)
    h = 1.0 / l
    # right-angle roof turned by 10 degrees; arms at 235 and 325 degrees
    th = math.radians(10)
    truth = Corner((15.4 * h, 15.6 * h), 1.25 * math.pi + th, 1.75 * math.pi + th)
    g = model_grid(truth, l)
    best, v = min(aeros_vertex_fit(g, cell), key=lambda p: p[1])
    assert v < 1e-20


def test_aeros_vertex_unconfined_is_empty():
    rng = np.random.default_rng(0)
    from subcell import CellGrid

    g = CellGrid(16, rng.uniform(0.2, 0.8, (16, 16)))
    assert aeros_vertex_fit(g, (8, 8)) == []


def test_tangent_line_of_linear_is_itself():
    m = Linear(0.3, 0.01, (0.5, 0.5))
    assert tangent_line(m, (0.1, 0.1)) is m
    assert tangent_line(Constant(1.0), (0.0, 0.0)) is None


def test_corner_from_tangents_convex_and_reflex():
    t1 = Linear(-math.pi / 4 % (2 * math.pi), 0.0, (0.0, 0.0))  # inside y <= -x
    t2 = Linear(math.pi / 4, 0.0, (0.0, 0.0))  # inside y <= x
    pts = np.array([[0.0, -0.5], [0.0, 0.5], [-1.0, 0.9], [1.0, 0.9], [0.0, -2.0]])
    # arms pointing down: roof y <= -|x|
    c = corner_from_tangents(t1, t2, (1.0, -1.0), (-1.0, -1.0), max_dist=5.0)
    assert c is not None and c.convex
    assert list(c.contains(pts[:, 0], pts[:, 1])) == [True, False, False, False, True]
    # arms pointing up: valley y <= |x|, the union of the two half-planes
    c2 = corner_from_tangents(t1, t2, (-1.0, 1.0), (1.0, 1.0), max_dist=5.0)
    assert c2 is not None and not c2.convex
    assert list(c2.contains(pts[:, 0], pts[:, 1])) == [True, False, True, True, True]


def test_corner_from_tangents_parallel_is_none():
    t = Linear(0.2, 0.0, (0.0, 0.0))
    assert corner_from_tangents(t, t, (-1.0, 0.0), (1.0, 0.0), 5.0) is None


def test_tem_on_grid_aligned_corner():
    l = 30
    h = 1.0 / l
    # square block with corners at cell centres: the corner cell's own stencil
    # is contaminated, neighbours two cells away are clean lines
    truth = Corner((10.5 * h, 10.5 * h), math.pi, 1.5 * math.pi)  # third quadrant wedge
    g = model_grid(truth, l)
    from subcell.pipeline import _base_pass
    from subcell.grid import classify_singular

    cells = classify_singular(g)
    base = _base_pass(g, cells)
    res = tem_fit(g, (10, 10), base)
    assert res is not None
    corner, v = res
    assert l1_model_distance(truth, corner, cell_rect(10, 10, h)) < 1e-10 * h * h


class _Boom:
    def __call__(self, g, c):
        raise ConfinementError("nope")


def test_aggregate_picks_minimum_and_keeps_ties():
    l, cell = 20, (10, 10)
    h = 1.0 / l
    truth = Linear(0.4, 0.0, (10.5 * h, 10.5 * h))
    g = model_grid(truth, l)
    worse = Linear(0.5, 0.0, truth.center)
    c = aggregate(g, cell, [("bad", lambda g_, c_: worse), ("good", lambda g_, c_: truth), ("same", lambda g_, c_: truth)])
    assert c.tag == "good" and c.model is truth
    c = aggregate(g, cell, [("boom", _Boom()), ("none", lambda g_, c_: None)])
    assert isinstance(c.model, Constant) and math.isinf(c.loss)
    with pytest.raises(ValueError):
        aggregate(g, cell, [])


def test_corner_domain_selects_corners():
    rec = reconstruct(rasterize(load_shape("corner"), 30), "aero-qelvira-vertex")
    kinds = [type(r.model).__name__ for r in rec.records.values()]
    assert kinds.count("Corner") >= 6


def test_vertex_pipeline_keeps_smooth_circle_smooth():
    rec = reconstruct(rasterize(load_shape("circle"), 30), "aero-qelvira-vertex")
    assert not any(isinstance(r.model, Corner) for r in rec.records.values())
