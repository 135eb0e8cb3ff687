import math

import numpy as np
import pytest

from helpers import model_grid, restricted_line
from subcell import CellGrid
from subcell.errors import ConfinementError
from subcell.models import Orientation, OrientedPoly
from subcell.orient import NumericalGradient, adaptive_stencil, frame_window, select_orientation, sobel, sobel_all


def test_sobel_matches_hand_formula():
    rng = np.random.default_rng(0)
    a = rng.random((5, 5))
    g = sobel(CellGrid(5, a), (2, 2))
    A = lambda dx, dy: a[2 + dx, 2 + dy]
    H = 2 * A(1, 0) + A(1, 1) + A(1, -1) - (2 * A(-1, 0) + A(-1, 1) + A(-1, -1))
    V = 2 * A(0, 1) + A(1, 1) + A(-1, 1) - (2 * A(0, -1) + A(1, -1) + A(-1, -1))
    assert g.H == pytest.approx(H) and g.V == pytest.approx(V)


def test_sobel_all_agrees_with_single_cell():
    rng = np.random.default_rng(1)
    a = rng.random((6, 6))
    H, V = sobel_all(a)
    grid = CellGrid(6, a)
    for i, j in [(0, 0), (3, 2), (5, 5)]:
        g = sobel(grid, (i, j))
        assert H[i, j] == pytest.approx(g.H) and V[i, j] == pytest.approx(g.V)


@pytest.mark.parametrize(
    "H,V,want",
    [
        (0.0, -1.0, Orientation.Y_LEQ),
        (0.5, 1.0, Orientation.Y_GEQ),
        (1.0, 1.0, Orientation.Y_GEQ),  # ties go to graphs over x
        (-2.0, 1.0, Orientation.X_LEQ),
        (2.0, 0.0, Orientation.X_GEQ),
        (0.0, 0.0, Orientation.Y_LEQ),
    ],
)
def test_selection_rule(H, V, want):
    assert select_orientation(NumericalGradient(H, V)) is want


def test_line_orientation_sides():
    l, cell = 20, (10, 10)
    # theta = 0 keeps the lower half: subgraph over x
    g = model_grid(restricted_line(0.1, 0.3, cell, l), l)
    assert select_orientation(sobel(g, cell)) is Orientation.Y_LEQ
    g = model_grid(restricted_line(math.pi + 0.1, 0.3, cell, l), l)
    assert select_orientation(sobel(g, cell)) is Orientation.Y_GEQ
    # theta = pi/2: inside is x >= ..., an epigraph over y
    g = model_grid(restricted_line(math.pi / 2 + 0.1, 0.3, cell, l), l)
    assert select_orientation(sobel(g, cell)) is Orientation.X_GEQ
    g = model_grid(restricted_line(3 * math.pi / 2 + 0.1, 0.3, cell, l), l)
    assert select_orientation(sobel(g, cell)) is Orientation.X_LEQ


@pytest.mark.parametrize("o", list(Orientation))
def test_frame_window_orientation(o):
    l, cell = 12, (6, 6)
    h = 1.0 / l
    model = OrientedPoly(o, (0.0, 0.2), ((6.5) * h, 6.5 * h), h)
    g = model_grid(model, l)
    W = frame_window(g, cell, o, [-1, 0, 1], [-2, -1, 0, 1, 2])
    # in the frame the inside is always below: full rows at the bottom
    assert np.all(W[:, 0] == 1.0) and np.all(W[:, -1] == 0.0)


def test_adaptive_stencil_flat_line_is_minimal():
    l, cell = 20, (10, 10)
    g = model_grid(restricted_line(0.0, 0.2, cell, l), l)
    st_ = adaptive_stencil(g, cell, Orientation.Y_LEQ, 1)
    assert (st_.l_minus, st_.l_plus, st_.k_minus, st_.k_plus) == (1, 1, 1, 1)
    st2 = adaptive_stencil(g, cell, Orientation.Y_LEQ, 2)
    assert st2.width == 5 and st2.height == 3


def test_adaptive_stencil_grows_with_slope():
    l, cell = 30, (15, 15)
    g = model_grid(restricted_line(0.7, 0.0, cell, l), l)  # slope ~ 0.84
    st_ = adaptive_stencil(g, cell, Orientation.Y_LEQ, 2)
    assert st_.height > 3
    W = frame_window(g, cell, Orientation.Y_LEQ, st_.columns, [-st_.l_minus - 1, st_.l_plus + 1])
    assert np.all(W[:, 0] == 1.0) and np.all(W[:, 1] == 0.0)


def test_adaptive_stencil_unconfined_raises():
    rng = np.random.default_rng(2)
    g = CellGrid(10, rng.uniform(0.2, 0.8, (10, 10)))
    with pytest.raises(ConfinementError):
        adaptive_stencil(g, (5, 5), Orientation.Y_LEQ, 1)
