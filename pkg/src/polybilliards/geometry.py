"""Polygon representation, validation, angle arithmetic and rationality.

Conventions used across the whole package:

* vertices are listed counterclockwise; clockwise input is rejected,
  never silently reversed (side numbering and circular order depend on
  the orientation, so a silent fix would hide caller bugs);
* sides and corners are numbered ``1..k``: side ``i`` runs from corner
  ``i`` to corner ``i+1`` (indices wrap), so corner ``i`` is the outgoing
  endpoint of side ``i``;
* a boundary position is the arc length measured from the side's outgoing
  endpoint; a corner has two boundary representations, the canonical one
  being position ``0`` on the outgoing side;
* interior angles live in ``(0, 2*pi)`` with straight corners (angle
  ``pi``) rejected; reflex corners are allowed.

Angles may optionally be declared as exact fractions ``m/n`` of ``pi``.
Declared fractions take precedence in rationality classification because
floating-point coordinates can never certify exact rationality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

from .config import DEFAULT, Tolerances
from .planar import Point, cross, dot, orient, segment_point_distance

_TWO_PI = 2.0 * math.pi


class PolygonError(ValueError):
    """Invalid polygon data (orientation, self-intersection, angles...)."""


class PolygonFormatError(ValueError):
    """Malformed polygon text."""


class BoundaryPoint(NamedTuple):
    """A point of the boundary: 1-based side index plus arc-length position."""

    side: int
    position: float


@dataclass(frozen=True)
class AngleClass:
    """Rationality classification of a polygon's interior angles.

    ``kind`` is one of ``"rational"``, ``"irrational"`` or ``"undecided"``
    (the warning zone: every angle is within 10x of the tolerance from a
    low-denominator fraction but at least one misses the tolerance proper).
    For rational polygons ``fractions[i] = (m, n)`` gives the reduced angle
    ``pi*m/n`` at corner ``i+1`` and ``lcm`` is the least common multiple
    of the denominators.
    """

    kind: str
    fractions: Optional[tuple[tuple[int, int], ...]]
    lcm: Optional[int]

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"


class Polygon:
    """An immutable simple polygon with counterclockwise boundary.

    Construction performs full validation and precomputes per-side data
    (tangents, inward normals, lengths, cumulative arc offsets) used by
    the dynamics.  Instances are safe to share between threads.
    """

    def __init__(self,
                 vertices: Sequence[Point],
                 angle_specs: Optional[Sequence[Optional[tuple[int, int]]]] = None,
                 name: str = "",
                 tol: Tolerances = DEFAULT):
        verts = tuple((float(x), float(y)) for x, y in vertices)
        k = len(verts)
        if k < 3:
            raise PolygonError(f"need at least 3 vertices, got {k}")
        for i in range(k):
            for j in range(i + 1, k):
                if math.hypot(verts[i][0] - verts[j][0],
                              verts[i][1] - verts[j][1]) <= tol.coord_snap:
                    raise PolygonError(
                        f"duplicate vertices {i + 1} and {j + 1}")

        area2 = 0.0
        for i in range(k):
            x0, y0 = verts[i]
            x1, y1 = verts[(i + 1) % k]
            area2 += x0 * y1 - x1 * y0
        if area2 < 0.0:
            raise PolygonError(
                "vertices are listed clockwise; reorder them counterclockwise")
        if area2 <= tol.coord_snap ** 2:
            raise PolygonError("degenerate polygon (zero area)")

        self._check_simple(verts, tol)

        angles = []
        for i in range(k):
            a = verts[i - 1]
            b = verts[i]
            c = verts[(i + 1) % k]
            din = (b[0] - a[0], b[1] - a[1])
            dout = (c[0] - b[0], c[1] - b[1])
            turn = math.atan2(cross(din[0], din[1], dout[0], dout[1]),
                              dot(din[0], din[1], dout[0], dout[1]))
            interior = math.pi - turn
            if abs(interior - math.pi) <= tol.angle_tol:
                raise PolygonError(
                    f"straight corner (angle pi) at vertex {i + 1}")
            angles.append(interior)

        specs: list[Optional[tuple[int, int]]] = [None] * k
        if angle_specs is not None:
            if len(angle_specs) != k:
                raise PolygonError("angle_specs length must match vertex count")
            for i, spec in enumerate(angle_specs):
                if spec is None:
                    continue
                m, n = int(spec[0]), int(spec[1])
                if m <= 0 or n <= 0:
                    raise PolygonError(f"angle spec at corner {i + 1} must be positive")
                if math.gcd(m, n) != 1:
                    raise PolygonError(
                        f"angle spec {m}/{n} at corner {i + 1} is not in lowest terms")
                declared = math.pi * m / n
                if abs(declared - angles[i]) > tol.angle_tol:
                    raise PolygonError(
                        f"declared angle pi*{m}/{n} at corner {i + 1} differs "
                        f"from coordinates by {abs(declared - angles[i]):.3e}")
                specs[i] = (m, n)

        self.name = name
        self.tol = tol
        self.vertices: tuple[Point, ...] = verts
        self.angle_specs: tuple[Optional[tuple[int, int]], ...] = tuple(specs)
        self._angles = tuple(angles)

        tangents = []
        normals = []
        lengths = []
        for i in range(k):
            x0, y0 = verts[i]
            x1, y1 = verts[(i + 1) % k]
            L = math.hypot(x1 - x0, y1 - y0)
            tx, ty = (x1 - x0) / L, (y1 - y0) / L
            tangents.append((tx, ty))
            normals.append((-ty, tx))  # interior is to the left of CCW sides
            lengths.append(L)
        self._tangents = tuple(tangents)
        self._normals = tuple(normals)
        self._lengths = tuple(lengths)
        self.perimeter = sum(lengths)
        offs = [0.0]
        for L in lengths[:-1]:
            offs.append(offs[-1] + L)
        self._arc_offsets = tuple(offs)
        self.signed_area = 0.5 * area2
        xs = [v[0] for v in verts]
        ys = [v[1] for v in verts]
        self.diameter = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
        self.is_convex = all(a < math.pi for a in angles)

    @staticmethod
    def _check_simple(verts: tuple[Point, ...], tol: Tolerances) -> None:
        k = len(verts)
        for i in range(k):
            a1, a2 = verts[i], verts[(i + 1) % k]
            for j in range(i + 1, k):
                if j == i or (j + 1) % k == i or (i + 1) % k == j:
                    continue  # adjacent sides share a corner
                b1, b2 = verts[j], verts[(j + 1) % k]
                d1 = orient(b1[0], b1[1], b2[0], b2[1], a1[0], a1[1])
                d2 = orient(b1[0], b1[1], b2[0], b2[1], a2[0], a2[1])
                d3 = orient(a1[0], a1[1], a2[0], a2[1], b1[0], b1[1])
                d4 = orient(a1[0], a1[1], a2[0], a2[1], b2[0], b2[1])
                if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
                    raise PolygonError(
                        f"self-intersection between sides {i + 1} and {j + 1}")
                # near-touching non-adjacent sides defeat corner snapping
                if min(segment_point_distance(*a1, *b1, *b2),
                       segment_point_distance(*a2, *b1, *b2),
                       segment_point_distance(*b1, *a1, *a2),
                       segment_point_distance(*b2, *a1, *a2)) <= tol.coord_snap:
                    raise PolygonError(
                        f"sides {i + 1} and {j + 1} touch within tolerance")

    # -- indexed accessors (1-based, wrapping) ------------------------------

    @property
    def side_count(self) -> int:
        return len(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def _si(self, i: int) -> int:
        k = len(self.vertices)
        if not 1 <= i <= k:
            raise IndexError(f"side/corner index {i} out of range 1..{k}")
        return i - 1

    def wrap(self, i: int) -> int:
        """Fold any integer onto the 1..k index range."""
        return (i - 1) % len(self.vertices) + 1

    def corner(self, i: int) -> Point:
        return self.vertices[self._si(i)]

    def side(self, i: int) -> tuple[Point, Point]:
        j = self._si(i)
        return self.vertices[j], self.vertices[(j + 1) % len(self.vertices)]

    def side_length(self, i: int) -> float:
        return self._lengths[self._si(i)]

    def tangent(self, i: int) -> Point:
        """Unit vector along side ``i`` in the direction of increasing position."""
        return self._tangents[self._si(i)]

    def inward_normal(self, i: int) -> Point:
        return self._normals[self._si(i)]

    def side_angle(self, i: int) -> float:
        """Plane angle of the side-``i`` tangent."""
        t = self._tangents[self._si(i)]
        return math.atan2(t[1], t[0])

    def interior_angle(self, i: int) -> float:
        return self._angles[self._si(i)]

    def angle_spec(self, i: int) -> Optional[tuple[int, int]]:
        return self.angle_specs[self._si(i)]

    def is_reflex(self, i: int) -> bool:
        return self._angles[self._si(i)] > math.pi

    # -- boundary coordinates ------------------------------------------------

    def arc_coordinate(self, b: BoundaryPoint) -> float:
        """Cumulative counterclockwise arc length of ``b`` from corner 1."""
        j = self._si(b.side)
        return self._arc_offsets[j] + b.position

    def boundary_to_plane(self, b: BoundaryPoint) -> Point:
        j = self._si(b.side)
        L = self._lengths[j]
        if not -self.tol.coord_snap <= b.position <= L + self.tol.coord_snap:
            raise PolygonError(
                f"position {b.position} outside side {b.side} of length {L}")
        x0, y0 = self.vertices[j]
        tx, ty = self._tangents[j]
        return (x0 + b.position * tx, y0 + b.position * ty)

    def plane_to_boundary(self, p: Point, snap: Optional[float] = None) -> BoundaryPoint:
        """Inverse of :meth:`boundary_to_plane` for points on the boundary.

        Raises :class:`PolygonError` when ``p`` is farther than the snap
        tolerance from every side.  Corner-adjacent results are returned in
        canonical form (position 0 on the outgoing side).
        """
        snap = self.tol.coord_snap if snap is None else snap
        k = len(self.vertices)
        best = None
        for i in range(k):
            x0, y0 = self.vertices[i]
            d = segment_point_distance(p[0], p[1], x0, y0,
                                       *self.vertices[(i + 1) % k])
            if best is None or d < best[0]:
                tx, ty = self._tangents[i]
                s = (p[0] - x0) * tx + (p[1] - y0) * ty
                s = min(max(s, 0.0), self._lengths[i])
                best = (d, i, s)
        if best is None or best[0] > snap:
            raise PolygonError(f"point {p} is not on the boundary")
        _, i, s = best
        return self.canonical_boundary_point(BoundaryPoint(i + 1, s))

    def canonical_boundary_point(self, b: BoundaryPoint) -> BoundaryPoint:
        """Snap corner representations to position 0 on the outgoing side."""
        j = self._si(b.side)
        L = self._lengths[j]
        if b.position >= L - self.tol.coord_snap:
            return BoundaryPoint(self.wrap(b.side + 1), 0.0)
        if b.position <= self.tol.coord_snap:
            return BoundaryPoint(b.side, 0.0)
        return b

    def is_corner_point(self, b: BoundaryPoint) -> bool:
        j = self._si(b.side)
        return (b.position <= self.tol.coord_snap
                or b.position >= self._lengths[j] - self.tol.coord_snap)

    # -- misc ----------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Polygon)
                and self.vertices == other.vertices
                and self.angle_specs == other.angle_specs)

    def __hash__(self) -> int:
        return hash((self.vertices, self.angle_specs))

    def __repr__(self) -> str:
        label = self.name or f"{len(self.vertices)}-gon"
        return f"Polygon({label}, k={len(self.vertices)})"


def validate_polygon(vertices: Sequence[Point],
                     angle_specs: Optional[Sequence[Optional[tuple[int, int]]]] = None,
                     name: str = "",
                     tol: Tolerances = DEFAULT) -> Polygon:
    """Validate a counterclockwise vertex chain and return the Polygon."""
    return Polygon(vertices, angle_specs=angle_specs, name=name, tol=tol)


def classify_rationality(p: Polygon,
                         max_denominator: int = 100,
                         tol: Optional[float] = None) -> AngleClass:
    """Classify the polygon's angles as rational multiples of pi.

    Corners with declared angle fractions are taken exactly.  The rest are
    approximated by the best fraction with denominator at most
    ``max_denominator`` (continued-fraction best approximation).  A corner
    counts as resolved when the approximation error is within ``tol``,
    lands in the warning zone within ``10*tol`` (kind ``"undecided"``) and
    is irrational otherwise.  With full angle specs the result does not
    depend on ``max_denominator`` or ``tol``.
    """
    if max_denominator < 2:
        raise ValueError("max_denominator must be at least 2")
    tol = p.tol.angle_tol if tol is None else tol
    fractions: list[tuple[int, int]] = []
    warning = False
    for i in range(1, len(p) + 1):
        spec = p.angle_spec(i)
        if spec is not None:
            fractions.append(spec)
            continue
        ratio = p.interior_angle(i) / math.pi
        best = Fraction(ratio).limit_denominator(max_denominator)
        err = abs(p.interior_angle(i) - math.pi * best.numerator / best.denominator)
        if err <= tol:
            fractions.append((best.numerator, best.denominator))
        elif err <= 10.0 * tol:
            warning = True
        else:
            return AngleClass("irrational", None, None)
    if warning:
        return AngleClass("undecided", None, None)
    N = 1
    for _, n in fractions:
        N = N * n // math.gcd(N, n)
    return AngleClass("rational", tuple(fractions), N)


def boundary_to_plane(p: Polygon, b: BoundaryPoint) -> Point:
    return p.boundary_to_plane(b)


def plane_to_boundary(p: Polygon, point: Point) -> BoundaryPoint:
    return p.plane_to_boundary(point)


# -- constructions ------------------------------------------------------------


def polygon_from_angles(fractions: Sequence[tuple[int, int]],
                        lengths: Sequence[float],
                        name: str = "",
                        tol: Tolerances = DEFAULT) -> Polygon:
    """Build a polygon from exact angle fractions and side lengths.

    ``fractions[i]`` declares the interior angle ``pi*m/n`` at corner
    ``i+1`` and ``lengths[i]`` the length of side ``i+1``.  The walk starts
    at the origin heading along +x; the chain must close up within the
    coordinate tolerance, otherwise the data are inconsistent.
    """
    k = len(fractions)
    if len(lengths) != k:
        raise PolygonError("need as many side lengths as angles")
    total = sum(Fraction(m, n) for m, n in fractions)
    if total != k - 2:
        raise PolygonError(
            f"angle fractions sum to {total}*pi, expected {k - 2}*pi")
    verts = [(0.0, 0.0)]
    heading = 0.0
    for i in range(k - 1):
        L = float(lengths[i])
        if L <= 0:
            raise PolygonError("side lengths must be positive")
        x, y = verts[-1]
        verts.append((x + L * math.cos(heading), y + L * math.sin(heading)))
        m, n = fractions[i + 1]
        heading += math.pi - math.pi * m / n
    gap = math.hypot(verts[0][0] - verts[-1][0] - float(lengths[-1]) * math.cos(heading),
                     verts[0][1] - verts[-1][1] - float(lengths[-1]) * math.sin(heading))
    scale = max(1.0, max(float(x) for x in lengths))
    if gap > 1e-7 * scale:
        raise PolygonError(f"sides do not close up (gap {gap:.3e})")
    specs = [(int(m), int(n)) for m, n in fractions]
    return Polygon(verts, angle_specs=specs, name=name, tol=tol)


def triangle_from_fractions(f1: tuple[int, int],
                            f2: tuple[int, int],
                            f3: tuple[int, int],
                            base: float = 1.0,
                            name: str = "") -> Polygon:
    """Triangle with angles ``pi*m_i/n_i`` at corners 1..3; side 1 has length ``base``."""
    A = Fraction(*f1) + Fraction(*f2) + Fraction(*f3)
    if A != 1:
        raise PolygonError(f"triangle angles sum to {A}*pi, expected pi")
    a1 = math.pi * f1[0] / f1[1]
    a2 = math.pi * f2[0] / f2[1]
    a3 = math.pi * f3[0] / f3[1]
    # law of sines: |side 3| = |side 1| * sin(angle 2) / sin(angle 3)
    b = base * math.sin(a2) / math.sin(a3)
    verts = [(0.0, 0.0), (base, 0.0), (b * math.cos(a1), b * math.sin(a1))]
    return Polygon(verts, angle_specs=[f1, f2, f3], name=name)


def rectangle(width: float, height: float, name: str = "") -> Polygon:
    w, h = float(width), float(height)
    return Polygon([(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)],
                   angle_specs=[(1, 2)] * 4, name=name or f"rect {w}x{h}")


def unit_square() -> Polygon:
    return rectangle(1.0, 1.0, name="unit square")


def regular_polygon(k: int, side: float = 1.0, name: str = "") -> Polygon:
    """Regular ``k``-gon with the given side length, corner 1 at the origin."""
    if k < 3:
        raise PolygonError("need k >= 3")
    frac = Fraction(k - 2, k)
    return polygon_from_angles([(frac.numerator, frac.denominator)] * k,
                               [side] * k,
                               name=name or f"regular {k}-gon")


def staircase_polygon(steps: Sequence[tuple[float, float]],
                      name: str = "") -> Polygon:
    """Axis-aligned rectilinear polygon from alternating (right, up) runs.

    ``steps`` lists positive (dx, dy) pairs walked to the right and up; the
    outline is closed with the bounding left and bottom edges.  All angles
    are pi/2 or 3*pi/2, so the result is rational with denominator lcm 2.
    """
    x = y = 0.0
    verts: list[Point] = [(0.0, 0.0)]
    for dx, dy in steps:
        if dx <= 0 or dy <= 0:
            raise PolygonError("staircase steps must be positive")
        x += dx
        verts.append((x, y))
        y += dy
        verts.append((x, y))
    verts.append((0.0, y))
    specs: list[tuple[int, int]] = [(1, 2)] * len(verts)
    # the up-then-right corners between consecutive steps are reflex
    for i in range(2, 2 * len(steps) - 1, 2):
        specs[i] = (3, 2)
    return Polygon(verts, angle_specs=specs, name=name or "staircase")


def lshape(width: float = 2.0, height: float = 2.0,
           notch_w: float = 1.0, notch_h: float = 1.0,
           name: str = "L-shape") -> Polygon:
    """L-shaped hexagon: a width x height rectangle with a corner notch removed."""
    w, h, nw, nh = float(width), float(height), float(notch_w), float(notch_h)
    if not (0 < nw < w and 0 < nh < h):
        raise PolygonError("notch must be strictly smaller than the rectangle")
    verts = [(0.0, 0.0), (w, 0.0), (w, h - nh), (w - nw, h - nh),
             (w - nw, h), (0.0, h)]
    specs = [(1, 2), (1, 2), (1, 2), (3, 2), (1, 2), (1, 2)]
    return Polygon(verts, angle_specs=specs, name=name)


# -- text format ---------------------------------------------------------------
#
#   # comment
#   polygon <name>
#   vertex <x> <y>          (repeated, counterclockwise)
#   angle <corner> <m>/<n>  (optional exact angle declarations)


def dumps_polygon(p: Polygon) -> str:
    lines = [f"polygon {p.name or 'unnamed'}"]
    for x, y in p.vertices:
        lines.append(f"vertex {x!r} {y!r}")
    for i, spec in enumerate(p.angle_specs):
        if spec is not None:
            lines.append(f"angle {i + 1} {spec[0]}/{spec[1]}")
    return "\n".join(lines) + "\n"


def loads_polygon(text: str, tol: Tolerances = DEFAULT) -> Polygon:
    name = None
    verts: list[Point] = []
    angle_lines: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "polygon":
            if name is not None:
                raise PolygonFormatError(f"line {lineno}: duplicate polygon header")
            if len(parts) != 2:
                raise PolygonFormatError(f"line {lineno}: expected 'polygon <name>'")
            name = parts[1]
        elif kind == "vertex":
            if name is None:
                raise PolygonFormatError(f"line {lineno}: vertex before polygon header")
            if len(parts) != 3:
                raise PolygonFormatError(f"line {lineno}: expected 'vertex <x> <y>'")
            try:
                verts.append((float(parts[1]), float(parts[2])))
            except ValueError as exc:
                raise PolygonFormatError(f"line {lineno}: bad coordinate: {exc}") from None
        elif kind == "angle":
            if len(parts) != 3 or "/" not in parts[2]:
                raise PolygonFormatError(
                    f"line {lineno}: expected 'angle <corner> <m>/<n>'")
            try:
                corner = int(parts[1])
                m_str, n_str = parts[2].split("/", 1)
                angle_lines.append((corner, int(m_str), int(n_str)))
            except ValueError as exc:
                raise PolygonFormatError(f"line {lineno}: bad angle spec: {exc}") from None
        else:
            raise PolygonFormatError(f"line {lineno}: unknown directive {kind!r}")
    if name is None:
        raise PolygonFormatError("missing 'polygon <name>' header")
    if len(verts) < 3:
        raise PolygonFormatError("fewer than 3 vertices")
    specs: list[Optional[tuple[int, int]]] = [None] * len(verts)
    for corner, m, n in angle_lines:
        if not 1 <= corner <= len(verts):
            raise PolygonFormatError(f"angle line references corner {corner}, "
                                     f"but there are {len(verts)} vertices")
        if specs[corner - 1] is not None:
            raise PolygonFormatError(f"duplicate angle line for corner {corner}")
        specs[corner - 1] = (m, n)
    return Polygon(verts, angle_specs=specs, name=name, tol=tol)


def load_polygon(path, tol: Tolerances = DEFAULT) -> Polygon:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_polygon(fh.read(), tol=tol)


def save_polygon(p: Polygon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_polygon(p))
