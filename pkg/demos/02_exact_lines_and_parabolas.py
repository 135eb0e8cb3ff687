"""
Exact recovery
==============

Straight interfaces are reproduced to roundoff by ELVIRA and by the
average-matching polynomial fit (AEROS). Polynomial graphs of degree 2k are
reproduced by AEROS with a (2k+1)-column stencil.
"""
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from helpers import model_grid, restricted_line  # noqa: E402

from subcell.aeros import aeros_fit
from subcell.elvira import elvira_fit
from subcell.models import Orientation, OrientedPoly, cell_rect, l1_model_distance

l, cell = 24, (12, 12)
h = 1.0 / l

line = restricted_line(2.0, 0.4, cell, l)
g = model_grid(line, l)
for name, fit in [("elvira", elvira_fit(g, cell)[0]), ("aeros k=1", aeros_fit(g, cell, 1)[0])]:
    print(f"{name:10s} cell L1 error {l1_model_distance(line, fit, cell_rect(*cell, h)):.1e}")

# a quartic graph in the frame whose w axis points down
truth = OrientedPoly(Orientation.Y_GEQ, (0.1, -0.3, 0.08, 0.01, -0.003), ((12.5) * h, 12.5 * h), h)
model, diag = aeros_fit(model_grid(truth, l), cell, 2)
print("true coeffs  ", np.round(truth.coeffs, 6))
print("fitted coeffs", np.round(model.coeffs, 6))
print("stencil", diag.stencil.width, "columns, orientation", diag.orientation.name)
print("max coefficient error", float(np.max(np.abs(np.subtract(model.coeffs, truth.coeffs)))))
