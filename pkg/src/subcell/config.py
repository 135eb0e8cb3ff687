"""Named test domains and the experiment-config schema shared by the CLI."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import InvalidShapeError
from .shapes import Shape, shape_from_json


def _corner_vertices():
    # pentagon with a notch: right-angle, obtuse, acute and reflex corners,
    # rotated so that no edge is grid-aligned
    local = [(-0.25, -0.2), (0.0, -0.05), (0.25, -0.2), (0.25, 0.1), (0.0, 0.28), (-0.25, 0.1)]
    c, s = math.cos(0.3), math.sin(0.3)
    return [[0.503 + c * x - s * y, 0.497 + s * x + c * y] for x, y in local]


NAMED_SHAPES = {
    "circle": {"circle": {"center": [0.5, 0.5], "r": 0.3}},
    "flower": {"polar_fourier": {"center": [0.5, 0.5], "r0": 0.25, "coeffs": [[0.02, 0.01], [0.03, -0.02], [0.0, 0.015]]}},
    "corner": {"polygon": _corner_vertices()},
    "zalesak": {
        "difference": [
            {"circle": {"center": [0.5, 0.75], "r": 0.15}},
            {"polygon": [[0.475, 0.6], [0.525, 0.6], [0.525, 0.85], [0.475, 0.85]]},
        ]
    },
}


def load_shape(ref) -> Shape:
    """Shape from a name in :data:`NAMED_SHAPES`, a JSON file path, a JSON
    string or an already-parsed object."""
    if isinstance(ref, Shape):
        return ref
    if isinstance(ref, dict):
        return shape_from_json(ref)
    ref = str(ref)
    if ref in NAMED_SHAPES:
        return shape_from_json(NAMED_SHAPES[ref])
    text = ref
    path = Path(ref)
    if not ref.lstrip().startswith("{"):
        if not path.exists():
            raise InvalidShapeError(f"unknown shape {ref!r}: not a named shape ({', '.join(NAMED_SHAPES)}) or a file")
        text = path.read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidShapeError(f"{ref}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return shape_from_json(obj)


@dataclass
class ExperimentConfig:
    """Settings for one CLI run; every field may come from a JSON file."""

    shape: str | dict = "circle"
    methods: list = field(default_factory=lambda: ["elvira-w-oriented"])
    l: int = 30
    resolutions: list = field(default_factory=lambda: [10, 20, 30, 40, 60, 80, 100])
    steps: int = 120
    reps: int = 3
    workers: int = 0  # 0 = all available cores
    seed: int = 0
    tol: float = 1e-15
    snapshots: list = field(default_factory=list)

    @classmethod
    def from_json(cls, path):
        try:
            obj = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        known = {f.name for f in fields(cls)}
        extra = set(obj) - known
        if extra:
            raise ValueError(f"{path}: unknown config keys {sorted(extra)}")
        return cls(**obj)

    def override(self, **kw):
        """Copy with the non-None keyword values replaced."""
        data = asdict(self)
        data.update({k: v for k, v in kw.items() if v is not None})
        return ExperimentConfig(**data)

    def header(self):
        """Provenance row written at the top of every output file."""
        d = asdict(self)
        return json.dumps(d, sort_keys=True, separators=(",", ":"))
