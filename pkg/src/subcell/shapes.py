"""Analytic ground-truth domains.

Every shape answers the few geometric questions the rest of the library
needs, all exactly or to quadrature precision:

* ``contains(x, y)`` -- vectorized point membership,
* ``area_in_polygon(P)`` -- area of the shape inside a *convex* CCW polygon,
* ``slice(axis, c)`` -- inside intervals along an axis-parallel line,
* ``curve_crossings(X, Y, t0, t1)`` -- parameters where a polynomial curve
  ``t -> (X(t), Y(t))`` meets the boundary,
* ``boundary_samples(spacing)`` -- points on the boundary no farther apart
  than ``spacing`` along the curve.

Convex-polygon areas are enough for rasterization and for L1 distances to
polygonal models; slices plus crossings feed the quadrature used for
curved models.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from . import geometry as geo
from .errors import InvalidShapeError


class Shape:
    """Base class; subclasses implement the geometric queries."""

    def contains(self, x, y):
        raise NotImplementedError

    def area_in_polygon(self, poly):
        raise NotImplementedError

    def area_in_rect(self, rect):
        return self.area_in_polygon(geo.rect_polygon(*rect))

    def area(self):
        raise NotImplementedError

    def bbox(self):
        raise NotImplementedError

    def slice(self, axis, c):
        """Sorted disjoint intervals of the shape on the line ``x=c`` (axis 0)
        or ``y=c`` (axis 1), parametrized by the other coordinate."""
        raise NotImplementedError

    def slice_breakpoints(self, axis):
        """Coordinates ``c`` at which ``slice(axis, c)`` is non-smooth."""
        return []

    def curve_crossings(self, X, Y, t0, t1):
        raise NotImplementedError

    def boundary_samples(self, spacing):
        raise NotImplementedError

    def translated(self, dx, dy):
        return Translated(self, dx, dy)

    def to_json(self):
        raise NotImplementedError


def _poly_compose_sq(a, b):
    """Coefficients of ``a(t)**2 + b(t)**2`` (low-to-high)."""
    return np.polynomial.polynomial.polyadd(
        np.polynomial.polynomial.polymul(a, a), np.polynomial.polynomial.polymul(b, b)
    )


@dataclass(frozen=True)
class Circle(Shape):
    center: tuple
    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise InvalidShapeError(f"circle radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    def contains(self, x, y):
        cx, cy = self.center
        return (np.asarray(x) - cx) ** 2 + (np.asarray(y) - cy) ** 2 <= self.radius**2

    def area_in_polygon(self, poly):
        cx, cy = self.center
        x0, x1, y0, y1 = geo.polygon_bbox(poly)
        r = self.radius
        if x0 >= cx + r or x1 <= cx - r or y0 >= cy + r or y1 <= cy - r:
            return 0.0
        return geo.disk_polygon_area(cx, cy, r, poly)

    def area_in_rect(self, rect):
        cx, cy = self.center
        return geo.disk_rect_area(cx, cy, self.radius, rect)

    def area(self):
        return math.pi * self.radius**2

    def bbox(self):
        cx, cy = self.center
        r = self.radius
        return cx - r, cx + r, cy - r, cy + r

    def slice(self, axis, c):
        cx, cy = self.center
        d = c - (cx if axis == 0 else cy)
        m = cy if axis == 0 else cx
        s = self.radius**2 - d * d
        if s <= 0.0:
            return []
        s = math.sqrt(s)
        return [(m - s, m + s)]

    def slice_breakpoints(self, axis):
        c = self.center[axis]
        return [c - self.radius, c + self.radius]

    def curve_crossings(self, X, Y, t0, t1):
        cx, cy = self.center
        X = np.array(X, dtype=float)
        Y = np.array(Y, dtype=float)
        X[0] -= cx
        Y[0] -= cy
        f = _poly_compose_sq(X, Y)
        f[0] -= self.radius**2
        return geo.real_roots_in(list(f), t0, t1)

    def boundary_samples(self, spacing):
        n = max(16, int(math.ceil(2.0 * math.pi * self.radius / spacing)) + 1)
        phi = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        cx, cy = self.center
        return np.column_stack([cx + self.radius * np.cos(phi), cy + self.radius * np.sin(phi)])

    def to_json(self):
        return {"circle": {"center": list(self.center), "r": self.radius}}


@dataclass(frozen=True)
class Polygon(Shape):
    """Simple polygon; vertices are stored counter-clockwise."""

    vertices: tuple

    def __post_init__(self):
        verts = [(float(x), float(y)) for x, y in self.vertices]
        if len(verts) < 3:
            raise InvalidShapeError("polygon needs at least 3 vertices")
        a = geo.polygon_area(verts)
        if a == 0.0:
            raise InvalidShapeError("polygon has zero area")
        if a < 0.0:
            verts = verts[::-1]
        object.__setattr__(self, "vertices", tuple(verts))

    @property
    def is_convex(self):
        v = self.vertices
        n = len(v)
        for k in range(n):
            ax, ay = v[k]
            bx, by = v[(k + 1) % n]
            cx, cy = v[(k + 2) % n]
            if (bx - ax) * (cy - by) - (by - ay) * (cx - bx) < 0.0:
                return False
        return True

    def contains(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = np.zeros(np.broadcast(x, y).shape, dtype=bool)
        v = self.vertices
        n = len(v)
        for k in range(n):
            ax, ay = v[k]
            bx, by = v[(k + 1) % n]
            crosses = (ay > y) != (by > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xi = ax + (y - ay) * (bx - ax) / (by - ay)
            inside ^= crosses & (x < xi)
        return inside

    def area_in_polygon(self, poly):
        x0, x1, y0, y1 = geo.polygon_bbox(poly)
        bx0, bx1, by0, by1 = self.bbox()
        if x0 >= bx1 or x1 <= bx0 or y0 >= by1 or y1 <= by0:
            return 0.0
        return abs(geo.polygon_area(geo.clip_polygon_convex(list(self.vertices), poly)))

    def area(self):
        return geo.polygon_area(list(self.vertices))

    def bbox(self):
        return geo.polygon_bbox(self.vertices)

    def slice(self, axis, c):
        other = 1 - axis
        v = self.vertices
        n = len(v)
        hits = []
        for k in range(n):
            p, q = v[k], v[(k + 1) % n]
            if (p[axis] > c) != (q[axis] > c):
                t = (c - p[axis]) / (q[axis] - p[axis])
                hits.append(p[other] + t * (q[other] - p[other]))
        hits.sort()
        return [(hits[2 * m], hits[2 * m + 1]) for m in range(len(hits) // 2)]

    def slice_breakpoints(self, axis):
        return sorted({p[axis] for p in self.vertices})

    def curve_crossings(self, X, Y, t0, t1):
        v = self.vertices
        n = len(v)
        out = []
        for k in range(n):
            (ax, ay), (bx, by) = v[k], v[(k + 1) % n]
            dx, dy = bx - ax, by - ay
            # n . (P(t) - A) = 0 with n = (dy, -dx)
            f = [dy * x for x in X]
            g = [-dx * y for y in Y]
            m = max(len(f), len(g))
            poly = [(f[i] if i < len(f) else 0.0) + (g[i] if i < len(g) else 0.0) for i in range(m)]
            poly[0] -= dy * ax - dx * ay
            L2 = dx * dx + dy * dy
            for t in geo.real_roots_in(poly, t0, t1):
                px, py = geo.horner(X, t), geo.horner(Y, t)
                s = ((px - ax) * dx + (py - ay) * dy) / L2
                if -1e-12 <= s <= 1.0 + 1e-12:
                    out.append(t)
        return sorted(out)

    def boundary_samples(self, spacing):
        pts = []
        v = self.vertices
        n = len(v)
        for k in range(n):
            (ax, ay), (bx, by) = v[k], v[(k + 1) % n]
            m = max(1, int(math.ceil(math.hypot(bx - ax, by - ay) / spacing)))
            t = np.arange(m) / m
            pts.append(np.column_stack([ax + t * (bx - ax), ay + t * (by - ay)]))
        return np.vstack(pts)

    def to_json(self):
        return {"polygon": [list(p) for p in self.vertices]}


@dataclass(frozen=True)
class PolarFourier(Shape):
    """Star-shaped blob ``r(phi) = r0 + sum_m a_m cos(m phi) + b_m sin(m phi)``.

    ``coeffs`` lists ``(a_m, b_m)`` for ``m = 1, 2, ...``.
    """

    center: tuple
    r0: float
    coeffs: tuple = ()
    n_samples: int = field(default=1024, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "coeffs", tuple((float(a), float(b)) for a, b in self.coeffs))
        phi = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
        if not np.all(self.radius(phi) > 0.0):
            raise InvalidShapeError("polar radius must stay positive")

    def radius(self, phi):
        phi = np.asarray(phi, dtype=float)
        r = np.full(phi.shape, self.r0)
        for m, (a, b) in enumerate(self.coeffs, start=1):
            r = r + a * np.cos(m * phi) + b * np.sin(m * phi)
        return r

    def dradius(self, phi):
        phi = np.asarray(phi, dtype=float)
        d = np.zeros(phi.shape)
        for m, (a, b) in enumerate(self.coeffs, start=1):
            d = d - m * a * np.sin(m * phi) + m * b * np.cos(m * phi)
        return d

    def point(self, phi):
        r = self.radius(phi)
        return self.center[0] + r * np.cos(phi), self.center[1] + r * np.sin(phi)

    def contains(self, x, y):
        dx = np.asarray(x, dtype=float) - self.center[0]
        dy = np.asarray(y, dtype=float) - self.center[1]
        return np.hypot(dx, dy) <= self.radius(np.arctan2(dy, dx))

    def area(self):
        val = self.r0**2 + 0.5 * sum(a * a + b * b for a, b in self.coeffs)
        return math.pi * val

    def bbox(self):
        x, y = self.point(np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False))
        pad = 1e-3 * self.r0
        return x.min() - pad, x.max() + pad, y.min() - pad, y.max() + pad

    def _roots(self, g):
        """Zeros of a smooth periodic function of phi via sampling + brentq."""
        phi = np.linspace(0.0, 2.0 * math.pi, self.n_samples + 1)
        vals = g(phi)
        out = []
        for k in range(self.n_samples):
            if vals[k] == 0.0:
                out.append(phi[k])
            elif vals[k] * vals[k + 1] < 0.0:
                out.append(optimize.brentq(g, phi[k], phi[k + 1], xtol=1e-15, rtol=1e-15))
        return out

    def _green(self, p0, p1):
        """Contribution 0.5 * int (x dy - y dx) along the boundary arc."""
        cx, cy = self.center

        def f(phi):
            r = self.radius(phi)
            dr = self.dradius(phi)
            x = cx + r * np.cos(phi)
            y = cy + r * np.sin(phi)
            dx = dr * np.cos(phi) - r * np.sin(phi)
            dy = dr * np.sin(phi) + r * np.cos(phi)
            return 0.5 * (x * dy - y * dx)

        val, _ = integrate.quad(f, p0, p1, epsabs=1e-15, epsrel=1e-13, limit=200)
        return val

    def area_in_polygon(self, poly):
        x0, x1, y0, y1 = geo.polygon_bbox(poly)
        bx0, bx1, by0, by1 = self.bbox()
        if x0 >= bx1 or x1 <= bx0 or y0 >= by1 or y1 <= by0:
            return 0.0
        n = len(poly)
        edge_hits = [[0.0, 1.0] for _ in range(n)]
        phis = []
        for k in range(n):
            (ax, ay), (bx, by) = poly[k], poly[(k + 1) % n]
            ex, ey = bx - ax, by - ay
            L2 = ex * ex + ey * ey

            def g(phi, ax=ax, ay=ay, ex=ex, ey=ey):
                x, y = self.point(phi)
                return ey * (x - ax) - ex * (y - ay)

            for phi in self._roots(g):
                x, y = self.point(phi)
                s = ((x - ax) * ex + (y - ay) * ey) / L2
                if 0.0 <= s <= 1.0:
                    phis.append(float(phi))
                    edge_hits[k].append(float(s))
        if not phis:
            vx, vy = poly[0]
            if self.contains(vx, vy):
                return abs(geo.polygon_area(poly))
            px, py = self.point(0.0)
            if _inside_convex(poly, float(px), float(py)):
                return self.area()
            return 0.0
        total = 0.0
        phis.sort()
        for k in range(len(phis)):
            p0 = phis[k]
            p1 = phis[k + 1] if k + 1 < len(phis) else phis[0] + 2.0 * math.pi
            if p1 - p0 <= 0.0:
                continue
            mx, my = self.point(0.5 * (p0 + p1))
            if _inside_convex(poly, float(mx), float(my)):
                total += self._green(p0, p1)
        for k in range(n):
            (ax, ay), (bx, by) = poly[k], poly[(k + 1) % n]
            ts = sorted(edge_hits[k])
            for s0, s1 in zip(ts[:-1], ts[1:]):
                if s1 <= s0:
                    continue
                sm = 0.5 * (s0 + s1)
                if self.contains(ax + sm * (bx - ax), ay + sm * (by - ay)):
                    xs, ys = ax + s0 * (bx - ax), ay + s0 * (by - ay)
                    xe, ye = ax + s1 * (bx - ax), ay + s1 * (by - ay)
                    total += 0.5 * (xs * ye - xe * ys)
        return max(total, 0.0)

    def slice(self, axis, c):
        comp = self.point
        vals = []
        for phi in self._roots(lambda p: comp(p)[axis] - c):
            vals.append(float(comp(phi)[1 - axis]))
        vals.sort()
        return [(vals[2 * m], vals[2 * m + 1]) for m in range(len(vals) // 2)]

    def slice_breakpoints(self, axis):
        # extremal coordinates, where the slice length has a square-root kink
        def g(phi):
            r = self.radius(phi)
            dr = self.dradius(phi)
            return dr * np.cos(phi) - r * np.sin(phi) if axis == 0 else dr * np.sin(phi) + r * np.cos(phi)

        return sorted(float(self.point(p)[axis]) for p in self._roots(g))

    def curve_crossings(self, X, Y, t0, t1, n=64):
        cx, cy = self.center

        def f(t):
            x = geo.horner(X, t) - cx
            y = geo.horner(Y, t) - cy
            return math.hypot(x, y) - float(self.radius(math.atan2(y, x)))

        ts = np.linspace(t0, t1, n + 1)
        vals = [f(t) for t in ts]
        out = []
        for k in range(n):
            if vals[k] * vals[k + 1] < 0.0:
                out.append(optimize.brentq(f, ts[k], ts[k + 1], xtol=1e-15))
        return out

    def boundary_samples(self, spacing):
        phi = np.linspace(0.0, 2.0 * math.pi, 4097)
        x, y = self.point(phi)
        length = float(np.sum(np.hypot(np.diff(x), np.diff(y))))
        n = max(64, int(math.ceil(2.0 * length / spacing)))
        x, y = self.point(np.linspace(0.0, 2.0 * math.pi, n, endpoint=False))
        return np.column_stack([x, y])

    def to_json(self):
        return {
            "polar_fourier": {
                "center": list(self.center),
                "r0": self.r0,
                "coeffs": [list(c) for c in self.coeffs],
            }
        }


def _inside_convex(poly, x, y):
    n = len(poly)
    for k in range(n):
        (ax, ay), (bx, by) = poly[k], poly[(k + 1) % n]
        if (bx - ax) * (y - ay) - (by - ay) * (x - ax) < 0.0:
            return False
    return True


@dataclass(frozen=True)
class Difference(Shape):
    """``a`` minus ``b``; ``b`` must be a convex polygon (Zalesak-style notch)."""

    a: Shape
    b: Shape

    def __post_init__(self):
        if not (isinstance(self.b, Polygon) and self.b.is_convex):
            raise InvalidShapeError("difference requires a convex polygon as the subtracted shape")

    def contains(self, x, y):
        return self.a.contains(x, y) & ~self.b.contains(x, y)

    def area_in_polygon(self, poly):
        total = self.a.area_in_polygon(poly)
        inner = geo.clip_polygon_convex(poly, list(self.b.vertices))
        if len(inner) >= 3 and geo.polygon_area(inner) > 0.0:
            total -= self.a.area_in_polygon(inner)
        return max(total, 0.0)

    def area(self):
        return self.a.area() - self.a.area_in_polygon(list(self.b.vertices))

    def bbox(self):
        return self.a.bbox()

    def slice(self, axis, c):
        lo, hi = -1e300, 1e300
        keep = geo.complement_intervals(self.b.slice(axis, c), lo, hi)
        return geo.intersect_intervals(self.a.slice(axis, c), keep)

    def slice_breakpoints(self, axis):
        return sorted(set(self.a.slice_breakpoints(axis)) | set(self.b.slice_breakpoints(axis)))

    def curve_crossings(self, X, Y, t0, t1):
        return sorted(self.a.curve_crossings(X, Y, t0, t1) + self.b.curve_crossings(X, Y, t0, t1))

    def boundary_samples(self, spacing):
        return np.vstack([self.a.boundary_samples(spacing), self.b.boundary_samples(spacing)])

    def to_json(self):
        return {"difference": [self.a.to_json(), self.b.to_json()]}


@dataclass(frozen=True)
class Translated(Shape):
    base: Shape
    dx: float
    dy: float

    def contains(self, x, y):
        return self.base.contains(np.asarray(x) - self.dx, np.asarray(y) - self.dy)

    def _shift(self, poly, sgn=-1.0):
        return [(x + sgn * self.dx, y + sgn * self.dy) for x, y in poly]

    def area_in_polygon(self, poly):
        return self.base.area_in_polygon(self._shift(poly))

    def area(self):
        return self.base.area()

    def bbox(self):
        x0, x1, y0, y1 = self.base.bbox()
        return x0 + self.dx, x1 + self.dx, y0 + self.dy, y1 + self.dy

    def slice(self, axis, c):
        d = (self.dx, self.dy)
        ivs = self.base.slice(axis, c - d[axis])
        o = d[1 - axis]
        return [(a + o, b + o) for a, b in ivs]

    def slice_breakpoints(self, axis):
        d = (self.dx, self.dy)[axis]
        return [c + d for c in self.base.slice_breakpoints(axis)]

    def curve_crossings(self, X, Y, t0, t1):
        X = list(X)
        Y = list(Y)
        X[0] -= self.dx
        Y[0] -= self.dy
        return self.base.curve_crossings(X, Y, t0, t1)

    def boundary_samples(self, spacing):
        return self.base.boundary_samples(spacing) + np.array([self.dx, self.dy])

    def to_json(self):
        return {"translate": {"shape": self.base.to_json(), "by": [self.dx, self.dy]}}


@dataclass(frozen=True)
class Periodic(Shape):
    """Unit-periodic extension of a shape whose copies do not overlap."""

    base: Shape

    def _copies(self, x0, x1, y0, y1):
        bx0, bx1, by0, by1 = self.base.bbox()
        out = []
        for sx in range(math.floor(x0 - bx1), math.ceil(x1 - bx0) + 1):
            for sy in range(math.floor(y0 - by1), math.ceil(y1 - by0) + 1):
                if bx0 + sx < x1 and bx1 + sx > x0 and by0 + sy < y1 and by1 + sy > y0:
                    out.append((sx, sy))
        return out

    def contains(self, x, y):
        x = np.mod(np.asarray(x, dtype=float), 1.0)
        y = np.mod(np.asarray(y, dtype=float), 1.0)
        res = np.zeros(np.broadcast(x, y).shape, dtype=bool)
        for sx, sy in self._copies(0.0, 1.0, 0.0, 1.0):
            res |= self.base.contains(x - sx, y - sy)
        return res

    def area_in_polygon(self, poly):
        total = 0.0
        for sx, sy in self._copies(*geo.polygon_bbox(poly)):
            total += self.base.area_in_polygon([(x - sx, y - sy) for x, y in poly])
        return total

    def area(self):
        return self.base.area()

    def bbox(self):
        return -math.inf, math.inf, -math.inf, math.inf

    def slice(self, axis, c, lo=-2.0, hi=3.0):
        ivs = []
        rng = (c, c, lo, hi) if axis == 0 else (lo, hi, c, c)
        for sx, sy in self._copies(*rng):
            s = (sx, sy)
            ivs += [(a + s[1 - axis], b + s[1 - axis]) for a, b in self.base.slice(axis, c - s[axis])]
        return geo.normalize_intervals(ivs)

    def slice_breakpoints(self, axis, lo=-2.0, hi=3.0):
        base = self.base.slice_breakpoints(axis)
        out = []
        for s in range(math.floor(lo) - 2, math.ceil(hi) + 3):
            out += [c + s for c in base if lo <= c + s <= hi]
        return sorted(out)

    def curve_crossings(self, X, Y, t0, t1):
        xs = [geo.horner(X, t) for t in np.linspace(t0, t1, 9)]
        ys = [geo.horner(Y, t) for t in np.linspace(t0, t1, 9)]
        pad = 0.5
        out = []
        for sx, sy in self._copies(min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad):
            Xs = list(X)
            Ys = list(Y)
            Xs[0] -= sx
            Ys[0] -= sy
            out += self.base.curve_crossings(Xs, Ys, t0, t1)
        return sorted(out)

    def boundary_samples(self, spacing):
        return np.mod(self.base.boundary_samples(spacing), 1.0)

    def to_json(self):
        return self.base.to_json()


def periodic(shape):
    return shape if isinstance(shape, Periodic) else Periodic(shape)


def shape_from_json(obj):
    """Build a shape from the JSON DSL (see README)."""
    if not isinstance(obj, dict) or len(obj) != 1:
        raise InvalidShapeError(f"shape must be a single-key object, got {obj!r}")
    (kind, body), = obj.items()
    try:
        if kind == "circle":
            return Circle(tuple(body["center"]), float(body["r"]))
        if kind == "polygon":
            return Polygon(tuple(tuple(p) for p in body))
        if kind == "polar_fourier":
            return PolarFourier(tuple(body["center"]), float(body["r0"]), tuple(tuple(c) for c in body.get("coeffs", [])))
        if kind == "difference":
            a, b = body
            return Difference(shape_from_json(a), shape_from_json(b))
        if kind == "translate":
            dx, dy = body["by"]
            return Translated(shape_from_json(body["shape"]), float(dx), float(dy))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidShapeError):
            raise
        raise InvalidShapeError(f"malformed {kind!r} shape: {exc}") from exc
    raise InvalidShapeError(f"unknown shape kind {kind!r}")
