"""Grid builders shared by the test modules."""
import math

import numpy as np

from subcell.grid import CellGrid
from subcell.models import Linear, cell_rect, support


def all_rects(l):
    h = 1.0 / l
    I, J = np.meshgrid(np.arange(l), np.arange(l), indexing="ij")
    return np.column_stack([I.ravel() * h, (I.ravel() + 1) * h, J.ravel() * h, (J.ravel() + 1) * h])


def model_grid(model, l):
    """Exact averages of a (non-periodic) model on every cell of an l x l grid."""
    if isinstance(model, Linear):
        return CellGrid(l, model.cell_averages(all_rects(l)).reshape(l, l))
    h = 1.0 / l
    a = np.array([[model.cell_average(cell_rect(i, j, h)) for j in range(l)] for i in range(l)])
    return CellGrid(l, a)


def restricted_line(theta, frac, cell, l):
    """Line at angle ``theta`` crossing ``cell``; ``|frac| < 1`` scales the offset range."""
    h = 1.0 / l
    center = ((cell[0] + 0.5) * h, (cell[1] + 0.5) * h)
    return Linear(theta % (2 * math.pi), frac * support(theta) * h, center)
