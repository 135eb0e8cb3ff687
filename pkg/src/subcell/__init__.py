"""Subcell interface reconstruction from cell averages."""
from .errors import ConfinementError, InvalidShapeError, NumericDegeneracyError, SchemeInstabilityError
from .grid import CellGrid, classify_singular, rasterize, total_mass
from .models import Constant, Corner, CircleModel, Linear, OrientedPoly, Orientation, Stencil
from .shapes import Circle, Difference, PolarFourier, Polygon

__version__ = "0.1.0"
