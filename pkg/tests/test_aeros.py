import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from helpers import model_grid
from subcell import CellGrid
from subcell.aeros import ColumnData, aeros_fit, average_interpolant, column_averages, column_moments
from subcell.errors import ConfinementError
from subcell.models import Orientation, OrientedPoly


def test_column_moments_match_quadrature():
    M = column_moments([-2, 0, 1], 4)
    for r, a in enumerate([-2, 0, 1]):
        for n in range(5):
            assert M[r, n] == pytest.approx(integrate.quad(lambda u: u**n, a - 0.5, a + 0.5)[0], abs=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-2.0, 2.0), min_size=5, max_size=5))
def test_average_interpolant_reproduces_polynomials(coeffs):
    cols = np.arange(-2, 3)
    P = np.polynomial.polynomial
    anti = P.polyint(coeffs)
    means = [P.polyval(a + 0.5, anti) - P.polyval(a - 0.5, anti) for a in cols]
    got = average_interpolant((cols, means), width=5)
    assert np.allclose(got, coeffs, atol=1e-10)


def test_average_interpolant_validation():
    with pytest.raises(ValueError):
        average_interpolant(([0, 0, 1], [0, 0, 0]))
    with pytest.raises(ValueError):
        average_interpolant(([0, 1, 2], [0, 0, 0]), width=5)


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("o", list(Orientation))
def test_aeros_recovers_polynomials(k, o):
    l, cell = 24, (12, 12)
    h = 1.0 / l
    coeffs = (0.1, 0.3, -0.08, 0.01, -0.004)[: 2 * k + 1]
    truth = OrientedPoly(o, coeffs, (12.5 * h, 12.5 * h), h)
    g = model_grid(truth, l)
    model, diag = aeros_fit(g, cell, k)
    assert diag.orientation is o
    assert diag.stencil.width == 2 * k + 1
    assert np.allclose(model.coeffs, coeffs, atol=1e-9)


def test_column_data_means_are_graph_averages():
    l, cell = 24, (12, 12)
    h = 1.0 / l
    truth = OrientedPoly(Orientation.Y_LEQ, (0.2, -0.1, 0.15), (12.5 * h, 12.5 * h), h)
    g = model_grid(truth, l)
    _, diag = aeros_fit(g, cell, 1)
    data = column_averages(g, diag.stencil)
    assert isinstance(data, ColumnData)
    for a, m in zip(data.columns, data.means):
        want = integrate.quad(lambda u: 0.2 - 0.1 * u + 0.15 * u * u, a - 0.5, a + 0.5)[0]
        assert m == pytest.approx(want, abs=1e-12)
    assert np.allclose(data.world_averages, h * data.sums)


def test_aeros_unconfined_raises():
    rng = np.random.default_rng(0)
    g = CellGrid(12, rng.uniform(0.1, 0.9, (12, 12)))
    with pytest.raises(ConfinementError):
        aeros_fit(g, (6, 6), 1)
