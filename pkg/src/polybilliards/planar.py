"""Low-level planar primitives shared by the whole package.

Points and vectors are plain ``(x, y)`` float tuples; isometries are
6-tuples ``(m00, m01, m10, m11, tx, ty)`` acting as ``M @ v + t``.  Keeping
these as tuples (rather than numpy arrays) makes the hot iteration loops an
order of magnitude faster.
"""

from __future__ import annotations

import math

Point = tuple[float, float]
Iso = tuple[float, float, float, float, float, float]

IDENTITY: Iso = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)


def cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def dot(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * bx + ay * by


def hypot2(ax: float, ay: float, bx: float, by: float) -> float:
    return math.hypot(bx - ax, by - ay)


def normalize_angle(a: float) -> float:
    """Fold an angle into [0, 2*pi)."""
    a = math.fmod(a, 2.0 * math.pi)
    if a < 0.0:
        a += 2.0 * math.pi
    return a


def angle_distance(a: float, b: float) -> float:
    """Distance between two angles on the circle, in [0, pi]."""
    d = math.fmod(abs(a - b), 2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def line_angle_distance(a: float, b: float) -> float:
    """Distance between two undirected line angles (mod pi), in [0, pi/2]."""
    d = math.fmod(abs(a - b), math.pi)
    return min(d, math.pi - d)


def iso_apply(g: Iso, p: Point) -> Point:
    x, y = p
    return (g[0] * x + g[1] * y + g[4], g[2] * x + g[3] * y + g[5])


def iso_apply_vector(g: Iso, v: Point) -> Point:
    x, y = v
    return (g[0] * x + g[1] * y, g[2] * x + g[3] * y)


def iso_apply_vector_inverse(g: Iso, v: Point) -> Point:
    # orthogonal linear part: inverse == transpose
    x, y = v
    return (g[0] * x + g[2] * y, g[1] * x + g[3] * y)


def iso_compose(g: Iso, h: Iso) -> Iso:
    """Composition g∘h (apply h first)."""
    a, b, c, d, e, f = g
    a2, b2, c2, d2, e2, f2 = h
    return (
        a * a2 + b * c2,
        a * b2 + b * d2,
        c * a2 + d * c2,
        c * b2 + d * d2,
        a * e2 + b * f2 + e,
        c * e2 + d * f2 + f,
    )


def iso_reflection(a: Point, b: Point) -> Iso:
    """Reflection across the line through points ``a`` and ``b``."""
    ax, ay = a
    ux, uy = b[0] - ax, b[1] - ay
    n = math.hypot(ux, uy)
    ux, uy = ux / n, uy / n
    m00 = ux * ux - uy * uy
    m01 = 2.0 * ux * uy
    # M = 2 u u^T - I ; translation keeps `a` fixed
    tx = ax - (m00 * ax + m01 * ay)
    ty = ay - (m01 * ax - m00 * ay)
    return (m00, m01, m01, -m00, tx, ty)


def iso_orthonormalize(g: Iso) -> Iso:
    """Re-orthonormalize the linear part of a drifting isometry product."""
    a, b, c, d, e, f = g
    n1 = math.hypot(a, c)
    a, c = a / n1, c / n1
    # remove the component of column 2 along column 1, then renormalize
    proj = a * b + c * d
    b, d = b - proj * a, d - proj * c
    n2 = math.hypot(b, d)
    b, d = b / n2, d / n2
    return (a, b, c, d, e, f)


def segment_point_distance(px: float, py: float, ax: float, ay: float,
                           bx: float, by: float) -> float:
    """Euclidean distance from point p to the closed segment [a, b]."""
    ux, uy = bx - ax, by - ay
    L2 = ux * ux + uy * uy
    if L2 <= 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * ux + (py - ay) * uy) / L2
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(px - ax - t * ux, py - ay - t * uy)


def orient(ax: float, ay: float, bx: float, by: float,
           cx: float, cy: float) -> float:
    """Twice the signed area of triangle (a, b, c)."""
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def segments_cross(a1: Point, a2: Point, b1: Point, b2: Point,
                   eps: float = 0.0) -> bool:
    """True when the interiors of segments [a1,a2] and [b1,b2] intersect.

    Proper crossings only, except for collinear segments whose interiors
    overlap in more than a point.  Endpoint touches within ``eps`` do not
    count.
    """
    d1 = orient(b1[0], b1[1], b2[0], b2[1], a1[0], a1[1])
    d2 = orient(b1[0], b1[1], b2[0], b2[1], a2[0], a2[1])
    d3 = orient(a1[0], a1[1], a2[0], a2[1], b1[0], b1[1])
    d4 = orient(a1[0], a1[1], a2[0], a2[1], b2[0], b2[1])
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and \
       ((d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)):
        return True
    if abs(d1) <= eps and abs(d2) <= eps and abs(d3) <= eps and abs(d4) <= eps:
        # collinear: project on the dominant axis and test interval overlap
        if abs(a2[0] - a1[0]) >= abs(a2[1] - a1[1]):
            lo1, hi1 = sorted((a1[0], a2[0]))
            lo2, hi2 = sorted((b1[0], b2[0]))
        else:
            lo1, hi1 = sorted((a1[1], a2[1]))
            lo2, hi2 = sorted((b1[1], b2[1]))
        return min(hi1, hi2) - max(lo1, lo2) > eps
    return False
