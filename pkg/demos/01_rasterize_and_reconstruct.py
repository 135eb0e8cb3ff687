"""
From a shape to cell averages and back
======================================

A shape only reaches the solver through its cell averages: the fraction of
each cell it covers. Reconstruction goes the other way and fits a small
interface model in every cell that the boundary crosses.
"""
import tempfile
from pathlib import Path

import numpy as np

from subcell import Circle, classify_singular, rasterize
from subcell.pipeline import global_l1_error, reconstruct
from subcell.svg import reconstruction_svg

disc = Circle((0.5, 0.5), 0.3)
grid = rasterize(disc, 20)

# averages sum to the area, up to roundoff
print("area       ", np.pi * 0.3**2)
print("grid mass  ", grid.averages.sum() * grid.h**2)

# cells strictly between empty and full carry the interface
cells = classify_singular(grid)
print("singular cells:", len(cells))

# piecewise constant just keeps the averages; ELVIRA fits a line per cell
for method in ["piecewise-constant", "elvira", "quadratic-aero"]:
    rec = reconstruct(grid, method)
    print(f"{method:20s} L1 error {global_l1_error(rec, disc):.3e}")

out = Path(tempfile.mkdtemp()) / "disc.svg"
out.write_text(reconstruction_svg(reconstruct(grid, "quadratic-aero")))
print("wrote", out)
