"""Interface families, exact cell averages and L1 distances.

Models live in world coordinates on the unit square (unwrapped; callers
shift cell rectangles, not models, when they need periodic neighbours).

Families
--------
``Constant``      -- the piecewise-constant baseline on one cell.
``Linear``        -- half-plane ``e . (z - center) <= r`` with
                     ``e = (-sin theta, cos theta)``; ``theta = 0`` means
                     "inside below a horizontal line".
``CircleModel``   -- disc (or its complement).
``OrientedPoly``  -- sub/epigraph of a polynomial in local coordinates
                     ``xh = (x - xc)/h``, ``yh = (y - yc)/h``.
``Corner``        -- counter-clockwise wedge from ray ``theta1`` to ray
                     ``theta2`` around a vertex.

Each oriented case is handled through a *frame* ``(u, w)`` in which the
inside is always ``w <= q(u)``:

==========  ============  ===========
case        (u, w)        q
==========  ============  ===========
Y_LEQ       (xh, yh)      p
Y_GEQ       (xh, -yh)     -p
X_LEQ       (yh, xh)      p
X_GEQ       (yh, -xh)     -p
==========  ============  ===========
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from . import geometry as geo
from .errors import NumericDegeneracyError

TWO_PI = 2.0 * math.pi


class Orientation(enum.Enum):
    Y_LEQ = "y<=p(x)"
    Y_GEQ = "y>=p(x)"
    X_LEQ = "x<=p(y)"
    X_GEQ = "x>=p(y)"

    @property
    def vertical(self):
        """True for graphs over x (slices run along y)."""
        return self in (Orientation.Y_LEQ, Orientation.Y_GEQ)

    @property
    def sign(self):
        return 1.0 if self in (Orientation.Y_LEQ, Orientation.X_LEQ) else -1.0

    @property
    def reverses(self):
        """Whether the frame map flips handedness."""
        return self in (Orientation.Y_GEQ, Orientation.X_LEQ)

    def flipped(self):
        return {
            Orientation.Y_LEQ: Orientation.Y_GEQ,
            Orientation.Y_GEQ: Orientation.Y_LEQ,
            Orientation.X_LEQ: Orientation.X_GEQ,
            Orientation.X_GEQ: Orientation.X_LEQ,
        }[self]

    def to_frame(self, xh, yh):
        if self is Orientation.Y_LEQ:
            return xh, yh
        if self is Orientation.Y_GEQ:
            return xh, -yh
        if self is Orientation.X_LEQ:
            return yh, xh
        return yh, -xh

    def from_frame(self, u, w):
        if self is Orientation.Y_LEQ:
            return u, w
        if self is Orientation.Y_GEQ:
            return u, -w
        if self is Orientation.X_LEQ:
            return w, u
        return -w, u

    def cell_offset(self, a, b):
        """Grid offset (di, dj) of frame cell (a, b)."""
        return self.from_frame(a, b)

    def rect_to_frame(self, xh0, xh1, yh0, yh1):
        """Local-coordinate rectangle to (u0, u1, w0, w1)."""
        if self is Orientation.Y_LEQ:
            return xh0, xh1, yh0, yh1
        if self is Orientation.Y_GEQ:
            return xh0, xh1, -yh1, -yh0
        if self is Orientation.X_LEQ:
            return yh0, yh1, xh0, xh1
        return yh0, yh1, -xh1, -xh0


def cell_rect(i, j, h):
    return (i * h, (i + 1) * h, j * h, (j + 1) * h)


def _rect_area(rect):
    return (rect[1] - rect[0]) * (rect[3] - rect[2])


class InterfaceModel:
    """Common interface.  ``inside`` is the set where the model equals 1."""

    polygonal = False

    def cell_average(self, rect):
        raise NotImplementedError

    def contains(self, x, y):
        raise NotImplementedError

    def pieces(self, rect):
        """Disjoint convex polygons covering ``inside`` within ``rect``
        (polygonal families only)."""
        raise NotImplementedError

    def slice(self, axis, c):
        raise NotImplementedError

    def slice_breakpoints(self, axis):
        return []

    def curve_crossings(self, X, Y, t0, t1):
        return []

    def flip(self):
        raise NotImplementedError

    def translated(self, dx, dy):
        raise NotImplementedError

    def boundary_points(self, rect, n=64):
        """Polylines (arrays of shape (m, 2)) tracing the interface in ``rect``."""
        return []

    def to_json(self):
        raise NotImplementedError

    # models can stand in for ground-truth shapes in distance computations
    def area_in_polygon(self, poly):
        return sum(abs(geo.polygon_area(geo.clip_polygon_convex(p, poly))) for p in self.pieces(geo.polygon_bbox(poly)))


@dataclass(frozen=True)
class Constant(InterfaceModel):
    value: float
    polygonal = True

    def cell_average(self, rect):
        return float(self.value)

    def contains(self, x, y):
        return np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, self.value >= 0.5)

    def pieces(self, rect):
        return [geo.rect_polygon(*rect)] if self.value >= 0.5 else []

    def flip(self):
        return Constant(1.0 - self.value)

    def translated(self, dx, dy):
        return self

    def to_json(self):
        return {"constant": {"value": self.value}}


@dataclass(frozen=True)
class Linear(InterfaceModel):
    theta: float
    r: float
    center: tuple = (0.0, 0.0)
    polygonal = True

    @property
    def normal(self):
        return (-math.sin(self.theta), math.cos(self.theta))

    def _halfplane(self):
        nx, ny = self.normal
        return nx, ny, self.r + nx * self.center[0] + ny * self.center[1]

    def cell_average(self, rect):
        nx, ny, c = self._halfplane()
        return min(1.0, max(0.0, geo.halfplane_rect_area(nx, ny, c, rect) / _rect_area(rect)))

    def cell_averages(self, rects):
        """Vectorized averages over an (n, 4) array of rectangles."""
        rects = np.asarray(rects, dtype=float)
        x0, x1, y0, y1 = rects.T
        nx, ny, c = self._halfplane()
        area = (x1 - x0) * (y1 - y0)
        if abs(ny) >= abs(nx):
            # graph over x: y <= (c - nx x)/ny  (or >= when ny < 0)
            sub = geo.linear_graph_area(c / ny, -nx / ny, x0, x1, y0, y1)
            inside = sub if ny > 0 else area - sub
        else:
            sub = geo.linear_graph_area(c / nx, -ny / nx, y0, y1, x0, x1)
            inside = sub if nx > 0 else area - sub
        return np.clip(inside / area, 0.0, 1.0)

    def contains(self, x, y):
        nx, ny, c = self._halfplane()
        return nx * np.asarray(x) + ny * np.asarray(y) <= c

    def pieces(self, rect):
        nx, ny, c = self._halfplane()
        p = geo.clip_halfplane(geo.rect_polygon(*rect), nx, ny, c)
        return [p] if len(p) >= 3 else []

    def slice(self, axis, c):
        nx, ny, d = self._halfplane()
        # along the line, the free coordinate t satisfies a*t <= b
        a, b = (ny, d - nx * c) if axis == 0 else (nx, d - ny * c)
        if a == 0.0:
            return [(-math.inf, math.inf)] if b >= 0.0 else []
        t = b / a
        return [(-math.inf, t)] if a > 0 else [(t, math.inf)]

    def curve_crossings(self, X, Y, t0, t1):
        nx, ny, d = self._halfplane()
        m = max(len(X), len(Y))
        f = [(nx * X[k] if k < len(X) else 0.0) + (ny * Y[k] if k < len(Y) else 0.0) for k in range(m)]
        f[0] -= d
        return geo.real_roots_in(f, t0, t1)

    def flip(self):
        return Linear((self.theta + math.pi) % TWO_PI, -self.r, self.center)

    def translated(self, dx, dy):
        return Linear(self.theta, self.r, (self.center[0] + dx, self.center[1] + dy))

    def in_cell(self, h):
        """Restriction: the line crosses the cell of side ``h`` centred at ``center``."""
        return abs(self.r) < support(self.theta) * h

    def boundary_points(self, rect, n=64):
        nx, ny, c = self._halfplane()
        x0, x1, y0, y1 = rect
        pts = []
        if ny != 0.0:
            for x in (x0, x1):
                y = (c - nx * x) / ny
                if y0 <= y <= y1:
                    pts.append((x, y))
        if nx != 0.0:
            for y in (y0, y1):
                x = (c - ny * y) / nx
                if x0 <= x <= x1:
                    pts.append((x, y))
        if len(pts) < 2:
            return []
        pts.sort()
        (ax, ay), (bx, by) = pts[0], pts[-1]
        t = np.linspace(0.0, 1.0, n)
        return [np.column_stack([ax + t * (bx - ax), ay + t * (by - ay)])]

    def to_json(self):
        return {"linear": {"theta": self.theta, "r": self.r, "center": list(self.center)}}


def support(theta):
    """Half-width factor: a unit square's support function along ``e_theta``."""
    return 0.5 * (abs(math.cos(theta)) + abs(math.sin(theta)))


def linear_from_frame(orientation, c, s, center, h):
    """Linear model equal to ``w <= c + s u`` in the given frame (unit cells)."""
    o = Orientation(orientation)
    # w - s u as alpha*xh + beta*yh
    if o is Orientation.Y_LEQ:
        alpha, beta = -s, 1.0
    elif o is Orientation.Y_GEQ:
        alpha, beta = -s, -1.0
    elif o is Orientation.X_LEQ:
        alpha, beta = 1.0, -s
    else:
        alpha, beta = -1.0, -s
    norm = math.hypot(alpha, beta)
    ex, ey = alpha / norm, beta / norm
    theta = math.atan2(-ex, ey) % TWO_PI
    return Linear(theta, c * h / norm, tuple(center))


@dataclass(frozen=True)
class CircleModel(InterfaceModel):
    center: tuple
    radius: float
    inside: bool = True

    def cell_average(self, rect):
        a = geo.disk_rect_area(self.center[0], self.center[1], self.radius, rect) / _rect_area(rect)
        a = min(1.0, max(0.0, a))
        return a if self.inside else 1.0 - a

    def contains(self, x, y):
        d = (np.asarray(x) - self.center[0]) ** 2 + (np.asarray(y) - self.center[1]) ** 2
        return (d <= self.radius**2) == self.inside

    def slice(self, axis, c):
        d = c - self.center[axis]
        m = self.center[1 - axis]
        s = self.radius**2 - d * d
        ivs = [] if s <= 0.0 else [(m - math.sqrt(s), m + math.sqrt(s))]
        if self.inside:
            return ivs
        return geo.complement_intervals(ivs, -math.inf, math.inf)

    def slice_breakpoints(self, axis):
        c = self.center[axis]
        return [c - self.radius, c + self.radius]

    def curve_crossings(self, X, Y, t0, t1):
        X = np.array(X, dtype=float)
        Y = np.array(Y, dtype=float)
        X[0] -= self.center[0]
        Y[0] -= self.center[1]
        P = np.polynomial.polynomial
        f = P.polyadd(P.polymul(X, X), P.polymul(Y, Y))
        f[0] -= self.radius**2
        return geo.real_roots_in(list(f), t0, t1)

    def flip(self):
        return CircleModel(self.center, self.radius, not self.inside)

    def translated(self, dx, dy):
        return CircleModel((self.center[0] + dx, self.center[1] + dy), self.radius, self.inside)

    def excludes_center(self, region):
        x0, x1, y0, y1 = region
        cx, cy = self.center
        return not (x0 <= cx <= x1 and y0 <= cy <= y1)

    def boundary_points(self, rect, n=64):
        phi = np.linspace(0.0, TWO_PI, 4 * n + 1)
        x = self.center[0] + self.radius * np.cos(phi)
        y = self.center[1] + self.radius * np.sin(phi)
        return _split_runs(x, y, rect)

    def to_json(self):
        return {"circle": {"center": list(self.center), "radius": self.radius, "inside": self.inside}}


def _split_runs(x, y, rect):
    x0, x1, y0, y1 = rect
    ok = (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)
    out = []
    start = None
    for k, flag in enumerate(list(ok) + [False]):
        if flag and start is None:
            start = k
        elif not flag and start is not None:
            if k - start >= 2:
                out.append(np.column_stack([x[start:k], y[start:k]]))
            start = None
    return out


@dataclass(frozen=True)
class OrientedPoly(InterfaceModel):
    """Sub/epigraph ``yh <= p(xh)`` (etc.) in the anchor cell's local units."""

    orientation: Orientation
    coeffs: tuple
    center: tuple
    h: float

    def __post_init__(self):
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        c = tuple(float(v) for v in self.coeffs)
        if len(c) > 5:
            raise ValueError("polynomial degree is limited to 4")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def q(self):
        """Frame polynomial: inside is ``w <= q(u)``."""
        s = self.orientation.sign
        return [s * v for v in self.coeffs]

    def _local(self, x, y):
        return (x - self.center[0]) / self.h, (y - self.center[1]) / self.h

    def frame_rect(self, rect):
        x0, y0 = self._local(rect[0], rect[2])
        x1, y1 = self._local(rect[1], rect[3])
        return self.orientation.rect_to_frame(x0, x1, y0, y1)

    def cell_average(self, rect):
        u0, u1, w0, w1 = self.frame_rect(rect)
        a = geo.poly_graph_area(self.q, u0, u1, w0, w1) / ((u1 - u0) * (w1 - w0))
        return min(1.0, max(0.0, a))

    def contains(self, x, y):
        xh, yh = self._local(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        u, w = self.orientation.to_frame(xh, yh)
        return w <= np.polynomial.polynomial.polyval(u, self.q)

    @property
    def slice_axis(self):
        return 0 if self.orientation.vertical else 1

    def slice(self, axis, c):
        if axis != self.slice_axis:
            raise ValueError("oriented polynomials are sliced along their graph direction only")
        u = (c - self.center[axis]) / self.h
        qv = geo.horner(self.q, u)
        # world coordinate along the slice is center + h * (+-w)
        m = self.center[1 - axis]
        if self.orientation.sign > 0:
            return [(-math.inf, m + self.h * qv)]
        return [(m - self.h * qv, math.inf)]

    def level_crossings(self, v, lo, hi):
        """Slice coordinates in ``(lo, hi)`` where the graph meets the world
        line at coordinate ``v`` across the slices."""
        ax = self.slice_axis
        w = self.orientation.sign * (v - self.center[1 - ax]) / self.h
        f = list(self.q)
        f[0] -= w
        ulo = (lo - self.center[ax]) / self.h
        uhi = (hi - self.center[ax]) / self.h
        return [self.center[ax] + self.h * u for u in geo.real_roots_in(f, ulo, uhi)]

    def world_curve(self):
        """Boundary as polynomials (X(u), Y(u)) in the frame abscissa ``u``."""
        h = self.h
        xc, yc = self.center
        P = [h * v for v in self.q]
        o = self.orientation
        if o is Orientation.Y_LEQ:
            return [xc, h], [yc + P[0]] + P[1:]
        if o is Orientation.Y_GEQ:
            return [xc, h], [yc - P[0]] + [-v for v in P[1:]]
        if o is Orientation.X_LEQ:
            return [xc + P[0]] + P[1:], [yc, h]
        return [xc - P[0]] + [-v for v in P[1:]], [yc, h]

    def curve_crossings(self, X, Y, t0, t1):
        P = np.polynomial.polynomial
        xh = np.array(X, dtype=float) / self.h
        yh = np.array(Y, dtype=float) / self.h
        xh[0] -= self.center[0] / self.h
        yh[0] -= self.center[1] / self.h
        u, w = self.orientation.to_frame(xh, yh)
        f = P.polysub(w, _compose(self.q, u))
        return geo.real_roots_in(list(f), t0, t1)

    def flip(self):
        return OrientedPoly(self.orientation.flipped(), self.coeffs, self.center, self.h)

    def translated(self, dx, dy):
        return OrientedPoly(self.orientation, self.coeffs, (self.center[0] + dx, self.center[1] + dy), self.h)

    def boundary_points(self, rect, n=64):
        u0, u1, _, _ = self.frame_rect(rect)
        u = np.linspace(u0, u1, n)
        w = np.polynomial.polynomial.polyval(u, self.q)
        xh, yh = self.orientation.from_frame(u, w)
        x = self.center[0] + self.h * xh
        y = self.center[1] + self.h * yh
        return _split_runs(x, y, rect)

    def to_json(self):
        return {
            "oriented_poly": {
                "orientation": self.orientation.name,
                "coeffs": list(self.coeffs),
                "center": list(self.center),
                "h": self.h,
            }
        }


def _compose(q, u):
    """Coefficients of ``q(u(t))`` for polynomial ``u``."""
    P = np.polynomial.polynomial
    out = np.zeros(1)
    for c in reversed(q):
        out = P.polyadd(P.polymul(out, u), [c])
    return out


@dataclass(frozen=True)
class Corner(InterfaceModel):
    """Wedge swept counter-clockwise from ray ``theta1`` to ray ``theta2``."""

    vertex: tuple
    theta1: float
    theta2: float
    polygonal = True

    @property
    def span(self):
        s = (self.theta2 - self.theta1) % TWO_PI
        return s

    def _halfplanes(self):
        vx, vy = self.vertex
        d1 = (math.cos(self.theta1), math.sin(self.theta1))
        d2 = (math.cos(self.theta2), math.sin(self.theta2))
        # left of ray 1: cross(d1, v) >= 0  <=>  (d1y, -d1x) . v <= 0
        h1 = (d1[1], -d1[0], d1[1] * vx - d1[0] * vy)
        # right of ray 2: cross(d2, v) <= 0
        h2 = (-d2[1], d2[0], -d2[1] * vx + d2[0] * vy)
        return h1, h2

    @property
    def convex(self):
        return self.span <= math.pi

    def pieces(self, rect):
        h1, h2 = self._halfplanes()
        box = geo.rect_polygon(*rect)
        if self.convex:
            p = geo.clip_halfplane(geo.clip_halfplane(box, *h1), *h2)
            return [p] if len(p) >= 3 else []
        # reflex wedge = H1 plus (H2 minus H1)
        p1 = geo.clip_halfplane(box, *h1)
        n1 = (-h1[0], -h1[1], -h1[2])
        p2 = geo.clip_halfplane(geo.clip_halfplane(box, *h2), *n1)
        return [p for p in (p1, p2) if len(p) >= 3]

    def cell_average(self, rect):
        a = sum(geo.polygon_area(p) for p in self.pieces(rect)) / _rect_area(rect)
        return min(1.0, max(0.0, a))

    def contains(self, x, y):
        (a1, b1, c1), (a2, b2, c2) = self._halfplanes()
        x = np.asarray(x)
        y = np.asarray(y)
        in1 = a1 * x + b1 * y <= c1
        in2 = a2 * x + b2 * y <= c2
        return (in1 & in2) if self.convex else (in1 | in2)

    def slice(self, axis, c):
        out = []
        for a, b, d in self._halfplanes():
            ca, cb = (b, d - a * c) if axis == 0 else (a, d - b * c)
            if ca == 0.0:
                out.append([(-math.inf, math.inf)] if cb >= 0.0 else [])
            else:
                t = cb / ca
                out.append([(-math.inf, t)] if ca > 0 else [(t, math.inf)])
        if self.convex:
            return geo.intersect_intervals(out[0], out[1])
        return geo.normalize_intervals(out[0] + out[1])

    def curve_crossings(self, X, Y, t0, t1):
        vx, vy = self.vertex
        res = []
        for th in (self.theta1, self.theta2):
            dx, dy = math.cos(th), math.sin(th)
            m = max(len(X), len(Y))
            f = [(dy * X[k] if k < len(X) else 0.0) - (dx * Y[k] if k < len(Y) else 0.0) for k in range(m)]
            f[0] -= dy * vx - dx * vy
            for t in geo.real_roots_in(f, t0, t1):
                if (geo.horner(X, t) - vx) * dx + (geo.horner(Y, t) - vy) * dy >= 0.0:
                    res.append(t)
        return sorted(res)

    def flip(self):
        return Corner(self.vertex, self.theta2, self.theta1)

    def translated(self, dx, dy):
        return Corner((self.vertex[0] + dx, self.vertex[1] + dy), self.theta1, self.theta2)

    def boundary_points(self, rect, n=64):
        vx, vy = self.vertex
        cx, cy = 0.5 * (rect[0] + rect[1]), 0.5 * (rect[2] + rect[3])
        big = 2.0 * (rect[1] - rect[0] + rect[3] - rect[2]) + math.hypot(vx - cx, vy - cy)
        s = np.linspace(0.0, big, 8 * n)
        x = np.concatenate([vx + math.cos(self.theta1) * s[::-1], vx + math.cos(self.theta2) * s[1:]])
        y = np.concatenate([vy + math.sin(self.theta1) * s[::-1], vy + math.sin(self.theta2) * s[1:]])
        return _split_runs(x, y, rect)

    def to_json(self):
        return {"corner": {"vertex": list(self.vertex), "theta1": self.theta1, "theta2": self.theta2}}


def corner_from_frame(orientation, vertex_uw, slope1, slope2, center, h):
    """Corner equal to ``w <= min/max`` of two frame lines meeting at ``vertex_uw``.

    Line 1 (slope ``slope1``) is the left branch and line 2 the right branch
    of the graph; the inside lies below the graph in the frame.
    """
    o = Orientation(orientation)
    u, w = vertex_uw
    xh, yh = o.from_frame(u, w)
    vertex = (center[0] + h * xh, center[1] + h * yh)
    # frame directions: ray 1 points to -u, ray 2 to +u
    d1 = o.from_frame(-1.0, -slope1)
    d2 = o.from_frame(1.0, slope2)
    t1 = math.atan2(d1[1], d1[0]) % TWO_PI
    t2 = math.atan2(d2[1], d2[0]) % TWO_PI
    if o.reverses:
        t1, t2 = t2, t1
    return Corner(vertex, t1, t2)


# --------------------------------------------------------------------------
# stencils
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Stencil:
    """Rectangular window in an orientation frame around anchor ``(i, j)``.

    Frame columns run over ``-k_minus..k_plus`` and rows over
    ``-l_minus..l_plus``; frame cell ``(a, b)`` is grid cell
    ``(i, j) + orientation.cell_offset(a, b)``.
    """

    anchor: tuple
    k_minus: int = 1
    k_plus: int = 1
    l_minus: int = 1
    l_plus: int = 1
    orientation: Orientation = Orientation.Y_LEQ

    @property
    def width(self):
        return 1 + self.k_minus + self.k_plus

    @property
    def height(self):
        return 1 + self.l_minus + self.l_plus

    @property
    def columns(self):
        return np.arange(-self.k_minus, self.k_plus + 1)

    @property
    def rows(self):
        return np.arange(-self.l_minus, self.l_plus + 1)

    @property
    def base_local(self):
        """Bottom of the window in frame units (anchor cell spans [-1/2, 1/2])."""
        return -self.l_minus - 0.5

    def base_elevation(self, h):
        """World coordinate of the window's bottom edge along the graph axis."""
        i, j = self.anchor
        o = self.orientation
        if o is Orientation.Y_LEQ:
            return (j - self.l_minus) * h
        if o is Orientation.Y_GEQ:
            return (j + self.l_minus + 1) * h
        if o is Orientation.X_LEQ:
            return (i - self.l_minus) * h
        return (i + self.l_minus + 1) * h

    def offsets(self):
        """Grid offsets of all cells, frame-row-major (bottom row first)."""
        out = []
        for b in self.rows:
            for a in self.columns:
                out.append(self.orientation.cell_offset(int(a), int(b)))
        return out

    def contains_offset(self, di, dj):
        a, b = self.orientation.to_frame(di, dj)
        return -self.k_minus <= a <= self.k_plus and -self.l_minus <= b <= self.l_plus

    def rects(self, h):
        i, j = self.anchor
        return [cell_rect(i + di, j + dj, h) for di, dj in self.offsets()]

    def region(self, h):
        rs = np.array(self.rects(h))
        return (rs[:, 0].min(), rs[:, 1].max(), rs[:, 2].min(), rs[:, 3].max())


def square_stencil(i, j, k=1):
    return Stencil((i, j), k, k, k, k, Orientation.Y_LEQ)


def stencil_averages(model: InterfaceModel, stencil: Stencil, h: float):
    rects = stencil.rects(h)
    if isinstance(model, Linear):
        return model.cell_averages(rects)
    return np.array([model.cell_average(r) for r in rects])


def stencil_data(grid, stencil: Stencil):
    """Grid averages in the same order as :func:`stencil_averages`."""
    i, j = stencil.anchor
    offs = np.array(stencil.offsets())
    return grid.averages[(i + offs[:, 0]) % grid.l, (j + offs[:, 1]) % grid.l]


# --------------------------------------------------------------------------
# L1 distances
# --------------------------------------------------------------------------


def _area_inside(region_like, rect):
    return region_like.area_in_polygon(geo.rect_polygon(*rect))


def _polygonal_distance(shape, model, rect):
    """``|A n R| + |M n R| - 2 |A n M n R|`` for a polygonal model ``M``."""
    pieces = model.pieces(rect)
    a_model = sum(abs(geo.polygon_area(p)) for p in pieces)
    a_shape = _area_inside(shape, rect)
    both = sum(shape.area_in_polygon(p) for p in pieces)
    return max(0.0, a_shape + a_model - 2.0 * both)


def _slice_distance(shape, model, rect, axis, tol):
    x0, x1, y0, y1 = rect
    lo, hi = (x0, x1) if axis == 0 else (y0, y1)
    plo, phi = (y0, y1) if axis == 0 else (x0, x1)
    pts = {lo, hi}
    for src in (shape, model):
        pts.update(c for c in src.slice_breakpoints(axis) if lo < c < hi)
        # interfaces meeting the window's sides parallel to the slices
        for edge in (plo, phi):
            if isinstance(src, OrientedPoly):
                pts.update(src.level_crossings(edge, lo, hi))
                continue
            for a, b in src.slice(1 - axis, edge):
                for v in (a, b):
                    if lo < v < hi:
                        pts.add(v)
    if isinstance(model, OrientedPoly) and model.slice_axis == axis:
        X, Y = model.world_curve()
        ulo = (lo - model.center[axis]) / model.h
        uhi = (hi - model.center[axis]) / model.h
        for u in shape.curve_crossings(X, Y, ulo, uhi):
            pts.add(model.center[axis] + model.h * u)
    brk = sorted(pts)

    def f(t):
        return geo.symdiff_measure(shape.slice(axis, t), model.slice(axis, t), plo, phi)

    total = 0.0
    with warnings.catch_warnings():
        # tangential contacts give square-root integrands; quad still converges
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(brk[:-1], brk[1:]):
            if b - a <= 1e-15:
                continue
            val, _ = integrate.quad(f, a, b, epsabs=tol, epsrel=1e-12, limit=200)
            total += val
    return total


def l1_shape_distance(shape, model: InterfaceModel, region, tol=1e-15):
    """``|(shape symmetric-difference model) n region|`` for a rectangle ``region``."""
    if isinstance(model, Constant):
        a = _area_inside(shape, region)
        return a * (1.0 - model.value) + (_rect_area(region) - a) * model.value
    if model.polygonal:
        return _polygonal_distance(shape, model, region)
    axis = model.slice_axis if isinstance(model, OrientedPoly) else 0
    return _slice_distance(shape, model, region, axis, tol)


def l1_model_distance(a: InterfaceModel, b: InterfaceModel, region, tol=1e-15):
    """L1 distance between two models on ``region``."""
    if a.polygonal and b.polygonal:
        if isinstance(a, Constant) and isinstance(b, Constant):
            return abs(a.value - b.value) * _rect_area(region)
        if isinstance(b, Constant):
            a, b = b, a
        if isinstance(a, Constant):
            return l1_shape_distance(b, a, region)
        return _polygonal_distance(a, b, region)
    if isinstance(b, OrientedPoly) and not isinstance(a, OrientedPoly):
        a, b = b, a
    if isinstance(a, OrientedPoly):
        if isinstance(b, OrientedPoly) and b.slice_axis != a.slice_axis:
            raise ValueError("cannot slice two polynomial graphs of different orientation")
        return _slice_distance(b, a, region, a.slice_axis, tol)
    return _slice_distance(b, a, region, 0, tol)


# --------------------------------------------------------------------------
# best approximation oracle (linear family)
# --------------------------------------------------------------------------


def best_approx_oracle(shape, center, h, region, n_theta=72, n_r=21, extra_starts=(), restricted=True):
    """Best L1 approximation of ``shape`` on ``region`` by a line crossing the
    cell of side ``h`` at ``center``.

    Dense ``(theta, r)`` grid search followed by Nelder-Mead polish from the
    best grid points and from any caller-supplied starting models.
    Returns ``(model, error)``.
    """

    def err(p):
        theta, rr = p
        m = Linear(theta % TWO_PI, rr * h, center)
        if restricted and not m.in_cell(h):
            return math.inf
        return l1_shape_distance(shape, m, region)

    thetas = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
    cands = []
    for th in thetas:
        R = support(th)
        for t in np.linspace(-0.95, 0.95, n_r):
            p = (th, t * R)
            cands.append((err(p), p))
    cands.sort(key=lambda c: c[0])
    starts = [c[1] for c in cands[:3]]
    starts += [(m.theta, m.r / h) for m in extra_starts]
    best = (math.inf, None)
    for s in starts:
        res = optimize.minimize(
            err, np.array(s, dtype=float), method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-16, "maxiter": 2000,
                     "initial_simplex": np.array([s, (s[0] + 0.05, s[1]), (s[0], s[1] + 0.05)])},
        )
        if res.fun < best[0]:
            best = (float(res.fun), res.x)
    if cands[0][0] < best[0]:
        best = cands[0][0], np.array(cands[0][1])
    theta, rr = best[1]
    return Linear(float(theta) % TWO_PI, float(rr) * h, tuple(center)), best[0]


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------


def model_to_json(model):
    return model.to_json()


def model_from_json(obj):
    (kind, body), = obj.items()
    if kind == "constant":
        return Constant(float(body["value"]))
    if kind == "linear":
        return Linear(float(body["theta"]), float(body["r"]), tuple(body.get("center", (0.0, 0.0))))
    if kind == "circle":
        return CircleModel(tuple(body["center"]), float(body["radius"]), bool(body.get("inside", True)))
    if kind == "oriented_poly":
        return OrientedPoly(Orientation[body["orientation"]], tuple(body["coeffs"]), tuple(body["center"]), float(body["h"]))
    if kind == "corner":
        return Corner(tuple(body["vertex"]), float(body["theta1"]), float(body["theta2"]))
    raise ValueError(f"unknown model kind {kind!r}")


def check_finite(values):
    if not np.all(np.isfinite(values)):
        raise NumericDegeneracyError("non-finite cell averages")
    return values
