"""Minimal SVG overlays of reconstructed interfaces on the unit square."""
from __future__ import annotations

from .models import Constant, cell_rect

SAMPLES = 64


def _path(points):
    # y is flipped so that the picture has y pointing up
    return " ".join(f"{'M' if k == 0 else 'L'}{x:.6f},{1.0 - y:.6f}" for k, (x, y) in enumerate(points))


def reconstruction_paths(rec, samples=SAMPLES):
    """Polylines of every non-constant model, clipped to its own cell."""
    h = rec.grid.h
    out = []
    for (i, j) in sorted(rec.records):
        model = rec.records[(i, j)].model
        if isinstance(model, Constant):
            continue
        for line in model.boundary_points(cell_rect(i, j, h), samples):
            if len(line) >= 2:
                out.append(line)
    return out


def shape_paths(shape, spacing):
    """Boundary samples of a ground-truth shape drawn as dots."""
    return shape.boundary_samples(spacing)


def render(layers, grid_l=None, size=600):
    """SVG document for ``layers = [(polylines, colour), ...]``.

    With ``grid_l`` the cell lines are drawn faintly underneath.
    """
    sw = 1.5 / size
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 1 1">',
        '<rect x="0" y="0" width="1" height="1" fill="white"/>',
    ]
    if grid_l:
        h = 1.0 / grid_l
        lines = " ".join(f"M{k * h:.6f},0 V1 M0,{k * h:.6f} H1" for k in range(grid_l + 1))
        parts.append(f'<path d="{lines}" stroke="#dddddd" stroke-width="{sw / 2:.6g}" fill="none"/>')
    for polylines, colour in layers:
        for line in polylines:
            parts.append(f'<path d="{_path(line)}" stroke="{colour}" stroke-width="{sw:.6g}" fill="none"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def reconstruction_svg(rec, reference=None, size=600):
    """Current interfaces in red over an optional reference in black."""
    layers = []
    if reference is not None:
        layers.append((reconstruction_paths(reference), "black"))
    layers.append((reconstruction_paths(rec), "red" if reference is not None else "black"))
    return render(layers, rec.grid.l, size)
