"""
Transport with reconstructed fluxes
===================================

Uniform horizontal advection moves the shape by b each step. The flux through
a face is the area of the reconstructed shape in the strip of width b upwind
of it, so sharper reconstructions keep corners sharper.
"""
import tempfile
from pathlib import Path

from subcell.config import load_shape
from subcell.fvs import TransportConfig, evolve
from subcell.svg import reconstruction_svg

corner = load_shape("corner")
l, steps = 20, 40  # half a period at CFL 1/4

out = Path(tempfile.mkdtemp())
for method in ["piecewise-constant", "elvira-w-oriented", "aero-qelvira-vertex"]:
    res = evolve(corner, TransportConfig(method, l, steps=steps), schedule=[steps])
    e0, e1 = res.errors[0][1], res.errors[-1][1]
    drift = max(abs(m - res.masses[0]) for m in res.masses)
    print(f"{method:20s} error {e0:.2e} -> {e1:.2e}   mass drift {drift:.1e}")
    (out / f"{method}.svg").write_text(reconstruction_svg(res.snapshots[steps]))
print("snapshots in", out)
