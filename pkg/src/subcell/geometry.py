"""Planar geometry kernels shared by shapes, models and quadrature.

Everything here is exact up to floating point: polygon clipping against
half-planes, disk/polygon intersection areas, integrals of clamped graphs
over rectangles, and small interval-set algebra used for slice quadrature.
Polygons are plain lists of ``(x, y)`` tuples; tiny polygons are faster in
pure Python than in numpy.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import NumericDegeneracyError

Rect = tuple  # (x0, x1, y0, y1)


# --------------------------------------------------------------------------
# polygons
# --------------------------------------------------------------------------


def rect_polygon(x0, x1, y0, y1):
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def polygon_area(poly):
    """Signed shoelace area (positive for counter-clockwise vertex order)."""
    n = len(poly)
    if n < 3:
        return 0.0
    s = 0.0
    x_prev, y_prev = poly[-1]
    for x, y in poly:
        s += x_prev * y - x * y_prev
        x_prev, y_prev = x, y
    return 0.5 * s


def clip_halfplane(poly, nx, ny, c):
    """Clip ``poly`` to ``{nx*x + ny*y <= c}`` (one Sutherland-Hodgman pass).

    The subject polygon may be non-convex; the result then may contain
    zero-width bridges, which do not change its area.
    """
    if not poly:
        return []
    out = []
    px, py = poly[-1]
    pd = nx * px + ny * py - c
    for qx, qy in poly:
        qd = nx * qx + ny * qy - c
        if qd <= 0.0:
            if pd > 0.0:
                t = pd / (pd - qd)
                out.append((px + t * (qx - px), py + t * (qy - py)))
            out.append((qx, qy))
        elif pd <= 0.0:
            t = pd / (pd - qd)
            out.append((px + t * (qx - px), py + t * (qy - py)))
        px, py, pd = qx, qy, qd
    return out


def clip_polygon_convex(poly, clip):
    """Clip ``poly`` by the convex counter-clockwise polygon ``clip``."""
    out = list(poly)
    n = len(clip)
    for k in range(n):
        ax, ay = clip[k]
        bx, by = clip[(k + 1) % n]
        # inside of a CCW edge is on its left: cross(b - a, p - a) >= 0
        nx, ny = (by - ay), -(bx - ax)
        out = clip_halfplane(out, nx, ny, nx * ax + ny * ay)
        if not out:
            return []
    return out


def halfplane_rect_area(nx, ny, c, rect):
    x0, x1, y0, y1 = rect
    return polygon_area(clip_halfplane(rect_polygon(x0, x1, y0, y1), nx, ny, c))


def polygon_bbox(poly):
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    return min(xs), max(xs), min(ys), max(ys)


# --------------------------------------------------------------------------
# disks
# --------------------------------------------------------------------------


def _disk_edge_area(ax, ay, bx, by, r2, r):
    """Signed area of disk(0, r) intersected with triangle (0, a, b)."""
    dx, dy = bx - ax, by - ay
    qa = dx * dx + dy * dy
    if qa == 0.0:
        return 0.0
    qb = 2.0 * (ax * dx + ay * dy)
    qc = ax * ax + ay * ay - r2
    ts = [0.0]
    disc = qb * qb - 4.0 * qa * qc
    if disc > 0.0:
        sq = math.sqrt(disc)
        for t in ((-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)):
            if 0.0 < t < 1.0:
                ts.append(t)
    ts.append(1.0)
    total = 0.0
    for t0, t1 in zip(ts[:-1], ts[1:]):
        px, py = ax + t0 * dx, ay + t0 * dy
        qx, qy = ax + t1 * dx, ay + t1 * dy
        mx, my = 0.5 * (px + qx), 0.5 * (py + qy)
        cross = px * qy - py * qx
        if mx * mx + my * my <= r2:
            total += 0.5 * cross
        else:
            total += 0.5 * r2 * math.atan2(cross, px * qx + py * qy)
    return total


def disk_polygon_area(cx, cy, r, poly):
    """Area of ``disk((cx, cy), r)`` intersected with a simple polygon."""
    n = len(poly)
    if n < 3:
        return 0.0
    r2 = r * r
    s = 0.0
    for k in range(n):
        ax, ay = poly[k]
        bx, by = poly[(k + 1) % n]
        s += _disk_edge_area(ax - cx, ay - cy, bx - cx, by - cy, r2, r)
    return abs(s)


def disk_rect_area(cx, cy, r, rect):
    x0, x1, y0, y1 = rect
    # nearest / farthest point of the rectangle from the center
    dx = max(x0 - cx, 0.0, cx - x1)
    dy = max(y0 - cy, 0.0, cy - y1)
    if dx * dx + dy * dy >= r * r:
        return 0.0
    fx = max(abs(x0 - cx), abs(x1 - cx))
    fy = max(abs(y0 - cy), abs(y1 - cy))
    if fx * fx + fy * fy <= r * r:
        return (x1 - x0) * (y1 - y0)
    return disk_polygon_area(cx, cy, r, rect_polygon(x0, x1, y0, y1))


# --------------------------------------------------------------------------
# polynomials
# --------------------------------------------------------------------------


def horner(coeffs, x):
    """Evaluate ``sum(c_k x**k)``; coefficients are low-to-high."""
    v = 0.0
    for c in reversed(coeffs):
        v = v * x + c
    return v


def poly_derivative(coeffs):
    return [k * coeffs[k] for k in range(1, len(coeffs))]


def poly_antiderivative(coeffs):
    return [0.0] + [coeffs[k] / (k + 1) for k in range(len(coeffs))]


def _trim(coeffs):
    c = [float(v) for v in coeffs]
    scale = max((abs(v) for v in c), default=0.0)
    while len(c) > 1 and abs(c[-1]) <= 1e-15 * scale:
        c.pop()
    return c


def real_roots_in(coeffs, a, b):
    """Real roots of a low-to-high polynomial strictly inside ``(a, b)``, sorted.

    Degree <= 2 uses closed forms; higher degrees use companion-matrix
    eigenvalues polished by Newton steps.  Tangential (double) roots may be
    dropped: they never change the measure of a sub/super-level set.
    """
    c = _trim(coeffs)
    deg = len(c) - 1
    if deg <= 0:
        return []
    if deg == 1:
        roots = [-c[0] / c[1]]
    elif deg == 2:
        c0, c1, c2 = c
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0.0:
            return []
        sq = math.sqrt(disc)
        q = -0.5 * (c1 + math.copysign(sq, c1))
        if q == 0.0:
            roots = [0.0]
        else:
            roots = [q / c2, c0 / q]
    else:
        if not all(math.isfinite(v) for v in c):
            raise NumericDegeneracyError(f"non-finite polynomial coefficients {c}")
        raw = np.polynomial.polynomial.polyroots(c)
        dc = poly_derivative(c)
        roots = []
        for z in raw:
            if abs(z.imag) > 1e-7 * (1.0 + abs(z.real)):
                continue
            x = float(z.real)
            for _ in range(2):
                d = horner(dc, x)
                if d == 0.0:
                    break
                x -= horner(c, x) / d
            roots.append(x)
    return sorted(x for x in roots if a < x < b)


def poly_graph_area(coeffs, u0, u1, w0, w1):
    """Area of ``{(u, w) in [u0,u1]x[w0,w1] : w <= q(u)}`` for polynomial ``q``."""
    c = list(coeffs)
    lo = list(c)
    lo[0] -= w0
    hi = list(c)
    hi[0] -= w1
    pts = [u0] + sorted(real_roots_in(lo, u0, u1) + real_roots_in(hi, u0, u1)) + [u1]
    prim = poly_antiderivative(c)
    total = 0.0
    height = w1 - w0
    for s, e in zip(pts[:-1], pts[1:]):
        if e <= s:
            continue
        v = horner(c, 0.5 * (s + e))
        if v >= w1:
            total += height * (e - s)
        elif v > w0:
            total += horner(prim, e) - horner(prim, s) - w0 * (e - s)
    return total


def linear_graph_area(c0, s, u0, u1, w0, w1):
    """Vectorized area of ``{w <= c0 + s*u}`` inside ``[u0,u1]x[w0,w1]``.

    The clamped line is piecewise linear between its (at most two) kinks,
    so the trapezoid rule on the kink-split pieces is exact.
    """
    c0 = np.asarray(c0, dtype=float)
    s = np.asarray(s, dtype=float)
    u0, u1, w0, w1 = (np.asarray(v, dtype=float) for v in (u0, u1, w0, w1))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ka = np.where(s != 0.0, (w0 - c0) / s, u0)
        kb = np.where(s != 0.0, (w1 - c0) / s, u0)
    ka = np.clip(ka, u0, u1)
    kb = np.clip(kb, u0, u1)
    pts = np.sort(np.stack(np.broadcast_arrays(u0, ka, kb, u1)), axis=0)
    g = np.clip(c0 + s * pts, w0, w1) - w0
    return np.sum(np.diff(pts, axis=0) * 0.5 * (g[1:] + g[:-1]), axis=0)


# --------------------------------------------------------------------------
# interval sets
# --------------------------------------------------------------------------


def normalize_intervals(ivs):
    """Sort and merge a list of ``(lo, hi)`` pairs, dropping empty ones."""
    ivs = sorted((a, b) for a, b in ivs if b > a)
    out = []
    for a, b in ivs:
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


def clip_intervals(ivs, lo, hi):
    return [(max(a, lo), min(b, hi)) for a, b in ivs if min(b, hi) > max(a, lo)]


def intersect_intervals(p, q):
    out = []
    i = j = 0
    while i < len(p) and j < len(q):
        a = max(p[i][0], q[j][0])
        b = min(p[i][1], q[j][1])
        if b > a:
            out.append((a, b))
        if p[i][1] < q[j][1]:
            i += 1
        else:
            j += 1
    return out


def complement_intervals(ivs, lo, hi):
    out = []
    cur = lo
    for a, b in ivs:
        if a > cur:
            out.append((cur, min(a, hi)))
        cur = max(cur, b)
        if cur >= hi:
            break
    if cur < hi:
        out.append((cur, hi))
    return [(a, b) for a, b in out if b > a]


def measure(ivs):
    return sum(b - a for a, b in ivs)


def symdiff_measure(p, q, lo, hi):
    """Length of ``(p symmetric-difference q)`` inside ``[lo, hi]``."""
    p = clip_intervals(p, lo, hi)
    q = clip_intervals(q, lo, hi)
    return measure(p) + measure(q) - 2.0 * measure(intersect_intervals(p, q))
