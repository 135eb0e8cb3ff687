import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import model_grid, restricted_line
from subcell import geometry as geo
from subcell.elvira import (
    elvira_candidates,
    elvira_fit,
    elvira_select,
    frame_line_candidates,
    frame_slopes,
    offset_for_area,
)
from subcell.models import Orientation, cell_rect, l1_model_distance
from subcell.obera import LossConfig


@settings(max_examples=200, deadline=None)
@given(area=st.floats(0.0, 1.0), s=st.floats(-20.0, 20.0, allow_subnormal=False))
def test_offset_for_area_inverts_area_map(area, s):
    c = offset_for_area(area, s)
    got = geo.linear_graph_area(c, s, -0.5, 0.5, -0.5, 0.5)
    assert got == pytest.approx(area, abs=1e-12)


def test_offset_for_area_is_monotone():
    cs = [offset_for_area(a, 0.7) for a in np.linspace(0.01, 0.99, 50)]
    assert np.all(np.diff(cs) > 0)


def test_frame_slopes_of_exact_columns():
    W = np.array([[1.0, 0.2, 0.0], [1.0, 0.5, 0.0], [1.0, 0.8, 0.0]])
    assert frame_slopes(W) == pytest.approx((0.3, 0.3, 0.3))


@pytest.mark.parametrize("oriented,n", [(False, 6), (True, 3)])
def test_candidate_counts(oriented, n):
    l, cell = 20, (10, 10)
    g = model_grid(restricted_line(0.4, 0.2, cell, l), l)
    o = None
    if oriented:
        o = Orientation.Y_LEQ
    assert len(elvira_candidates(g, cell, o)) == n
    assert elvira_fit(g, cell, oriented=oriented)[2] == n


@pytest.mark.parametrize("oriented", [False, True])
def test_exact_for_random_lines(oriented):
    rng = np.random.default_rng(5)
    l, cell = 20, (10, 10)
    for _ in range(50):
        m = restricted_line(rng.uniform(0, 2 * math.pi), rng.uniform(-0.97, 0.97), cell, l)
        g = model_grid(m, l)
        fit, v, _ = elvira_fit(g, cell, oriented=oriented)
        assert v < 1e-20
        assert l1_model_distance(m, fit, cell_rect(*cell, g.h)) < 1e-10 * g.h**2


def test_fast_path_matches_generic_selection():
    rng = np.random.default_rng(6)
    l, cell = 20, (10, 10)
    h = 1.0 / l
    # a slightly curved interface so the candidates differ
    from subcell.models import OrientedPoly

    for _ in range(10):
        truth = OrientedPoly(Orientation.Y_LEQ, (rng.uniform(-0.3, 0.3), rng.uniform(-0.6, 0.6), rng.uniform(-0.3, 0.3)), (10.5 * h, 10.5 * h), h)
        g = model_grid(truth, l)
        fast, v_fast, _ = elvira_fit(g, cell)
        slow, v_slow = elvira_select(g, cell, elvira_candidates(g, cell), LossConfig("L2", 1.0))
        assert v_fast == pytest.approx(v_slow, rel=1e-9, abs=1e-15)


def test_frame_candidates_match_anchor():
    l, cell = 20, (10, 10)
    g = model_grid(restricted_line(2.5, -0.3, cell, l), l)
    for c, s, _ in frame_line_candidates(g, cell, Orientation.Y_GEQ):
        assert geo.linear_graph_area(c, s, -0.5, 0.5, -0.5, 0.5) == pytest.approx(g[cell], abs=1e-12)


def test_select_requires_candidates():
    l, cell = 20, (10, 10)
    g = model_grid(restricted_line(2.5, -0.3, cell, l), l)
    with pytest.raises(ValueError):
        elvira_select(g, cell, [], LossConfig())
