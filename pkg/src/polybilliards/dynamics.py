"""The billiard map on the boundary phase space, orbits and metrics.

A phase point is ``(side, position, theta)``: a non-corner boundary point
plus the direction of the *outgoing* ray.  ``theta`` is measured from the
side's inward normal and is positive toward increasing arc-length position
(toward the side's incoming endpoint); it lies strictly inside
``(-pi/2, pi/2)``.  With this convention the outgoing ray direction is::

    d = cos(theta) * inward_normal + sin(theta) * tangent

and the reflection law is equivalent to the signed tangential component of
the velocity being preserved at every bounce.

The map is undefined at corners and for rays running along a side; those
outcomes are reported as :class:`CornerHit` / :class:`Tangency` values
instead of phase points.  A ray passing within the snap tolerance of a
corner is reported as a corner hit flagged ``tolerance_limited`` rather
than being silently resolved to either adjacent side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .geometry import BoundaryPoint, Polygon
from .planar import (Iso, IDENTITY, iso_apply, iso_apply_vector_inverse,
                     iso_compose, iso_orthonormalize, iso_reflection)

_HALF_PI = math.pi / 2.0

#: minimum advance along a ray for an intersection to count as a new hit
_T_MIN = 1e-12
#: |cos(theta)| below this at a hit counts as running along the side
_GRAZING = 1e-12
#: corner misses larger than this are tolerance calls, not exact hits
_EXACT_CORNER = 1e-12


@dataclass(frozen=True)
class PhasePoint:
    side: int
    position: float
    theta: float

    def boundary_point(self) -> BoundaryPoint:
        return BoundaryPoint(self.side, self.position)


@dataclass(frozen=True)
class CornerHit:
    """The outgoing segment ends at (or within snap tolerance of) a corner."""

    corner: int
    miss_distance: float
    tolerance_limited: bool


@dataclass(frozen=True)
class Tangency:
    """The outgoing ray runs along the line of a side."""

    side: int


StepOutcome = Union[PhasePoint, CornerHit, Tangency]


@dataclass
class Orbit:
    """A finite forward orbit ``u_0, u_1, ..`` of the billiard map.

    ``directions[i]`` is the plane angle of the free-flight segment leaving
    ``points[i]``.  When the orbit stops early, ``terminated`` holds the
    corner hit or tangency that ended it (the offending segment leaves the
    last listed point).
    """

    polygon: Polygon
    points: list[PhasePoint]
    directions: list[float]
    terminated: Optional[Union[CornerHit, Tangency]] = None

    @property
    def start(self) -> PhasePoint:
        return self.points[0]

    def __len__(self) -> int:
        return len(self.points)

    def code_symbols(self) -> tuple[int, ...]:
        return tuple(u.side for u in self.points)

    def bounce_plane_points(self) -> list[tuple[float, float]]:
        return [self.polygon.boundary_to_plane(u.boundary_point())
                for u in self.points]


def check_phase_point(p: Polygon, u: PhasePoint) -> None:
    if not 1 <= u.side <= len(p):
        raise ValueError(f"side {u.side} out of range 1..{len(p)}")
    L = p.side_length(u.side)
    if not p.tol.coord_snap < u.position < L - p.tol.coord_snap:
        raise ValueError(
            f"position {u.position} on side {u.side} is a corner or outside [0, {L}]")
    if not abs(u.theta) < _HALF_PI:
        raise ValueError(f"theta {u.theta} outside (-pi/2, pi/2)")


def direction_vector(p: Polygon, u: PhasePoint) -> tuple[float, float]:
    """Unit plane vector of the ray leaving ``u``."""
    nx, ny = p.inward_normal(u.side)
    tx, ty = p.tangent(u.side)
    c, s = math.cos(u.theta), math.sin(u.theta)
    return (c * nx + s * tx, c * ny + s * ty)


def plane_direction(p: Polygon, u: PhasePoint) -> float:
    dx, dy = direction_vector(p, u)
    return math.atan2(dy, dx)


def phase_from_direction(p: Polygon, side: int, position: float,
                         dx: float, dy: float) -> PhasePoint:
    """Phase point on ``side`` whose outgoing ray has plane direction (dx, dy)."""
    nx, ny = p.inward_normal(side)
    tx, ty = p.tangent(side)
    return PhasePoint(side, position,
                      math.atan2(dx * tx + dy * ty, dx * nx + dy * ny))


class _SideTable:
    """Flat per-side float arrays for the hot ray-casting loop."""

    __slots__ = ("k", "ax", "ay", "tx", "ty", "nx", "ny", "L", "snap",
                 "reflections")

    def __init__(self, p: Polygon):
        k = len(p)
        self.k = k
        self.ax = [p.corner(i + 1)[0] for i in range(k)]
        self.ay = [p.corner(i + 1)[1] for i in range(k)]
        self.tx = [p.tangent(i + 1)[0] for i in range(k)]
        self.ty = [p.tangent(i + 1)[1] for i in range(k)]
        self.nx = [p.inward_normal(i + 1)[0] for i in range(k)]
        self.ny = [p.inward_normal(i + 1)[1] for i in range(k)]
        self.L = [p.side_length(i + 1) for i in range(k)]
        self.snap = p.tol.coord_snap
        self.reflections: list[Iso] = [iso_reflection(*p.side(i + 1))
                                       for i in range(k)]

    def cast(self, px: float, py: float, dx: float, dy: float,
             skip: int) -> Optional[tuple[int, float, float]]:
        """First boundary hit of the ray from (px, py): ``(side0, t, s)``.

        ``skip`` excludes the side the ray starts on (a straight line can
        never return to it).  Returns None when nothing is hit (only
        possible for rays escaping a numerically broken polygon).
        """
        ax, ay, tx, ty, L = self.ax, self.ay, self.tx, self.ty, self.L
        snap = self.snap
        best_t = None
        best = None
        for i in range(self.k):
            if i == skip:
                continue
            txi = tx[i]
            tyi = ty[i]
            den = txi * dy - tyi * dx
            if den == 0.0:
                continue
            wx = ax[i] - px
            wy = ay[i] - py
            t = (txi * wy - tyi * wx) / den
            if t <= _T_MIN or (best_t is not None and t >= best_t):
                continue
            s = (dx * wy - dy * wx) / den
            if -snap <= s <= L[i] + snap:
                best_t = t
                best = (i, t, s)
        return best


def _side_table(p: Polygon) -> _SideTable:
    table = getattr(p, "_side_table_cache", None)
    if table is None:
        table = _SideTable(p)
        p._side_table_cache = table  # type: ignore[attr-defined]
    return table


def _outcome_from_hit(p: Polygon, table: _SideTable, hit, px, py, dx, dy):
    """Classify a raw cast hit as the next phase point / corner / tangency."""
    i, t, s = hit
    L = table.L[i]
    snap = table.snap
    near_start = s <= snap
    near_end = s >= L - snap
    if near_start or near_end:
        corner0 = i if near_start else (i + 1) % table.k
        cx = table.ax[corner0]
        cy = table.ay[corner0]
        miss = abs((cx - px) * dy - (cy - py) * dx)  # d is unit
        return CornerHit(corner0 + 1, miss, miss > _EXACT_CORNER)
    dn = dx * table.nx[i] + dy * table.ny[i]
    if dn >= -_GRAZING:
        return Tangency(i + 1)
    rx = dx - 2.0 * dn * table.nx[i]
    ry = dy - 2.0 * dn * table.ny[i]
    theta = math.atan2(rx * table.tx[i] + ry * table.ty[i],
                       rx * table.nx[i] + ry * table.ny[i])
    return PhasePoint(i + 1, s, theta)


def step(p: Polygon, u: PhasePoint) -> StepOutcome:
    """One application of the billiard map."""
    check_phase_point(p, u)
    table = _side_table(p)
    j = u.side - 1
    px = table.ax[j] + u.position * table.tx[j]
    py = table.ay[j] + u.position * table.ty[j]
    dx, dy = direction_vector(p, u)
    hit = table.cast(px, py, dx, dy, j)
    if hit is None:
        raise ArithmeticError("ray escaped the polygon; geometry is degenerate")
    return _outcome_from_hit(p, table, hit, px, py, dx, dy)


def iterate(p: Polygon, u: PhasePoint, n: int,
            renorm_every: int = 1024) -> Orbit:
    """Forward orbit of length at most ``n`` (``n`` applications of the map).

    Positions are periodically re-derived from the unfolded straight line
    (every ``renorm_every`` bounces) instead of being accumulated bounce by
    bounce, which keeps the drift of long orbits down to a single
    segment's worth of rounding error.  Pass ``renorm_every=0`` to disable.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    check_phase_point(p, u)
    table = _side_table(p)
    k = table.k
    j = u.side - 1
    px = table.ax[j] + u.position * table.tx[j]
    py = table.ay[j] + u.position * table.ty[j]
    dx, dy = direction_vector(p, u)
    points = [u]
    directions = [math.atan2(dy, dx)]
    terminated: Optional[Union[CornerHit, Tangency]] = None

    # unfolding bookkeeping for the periodic renormalization
    x0, y0, dx0, dy0 = px, py, dx, dy
    g: Iso = IDENTITY

    for count in range(1, n + 1):
        hit = table.cast(px, py, dx, dy, j)
        if hit is None:
            raise ArithmeticError("ray escaped the polygon; geometry is degenerate")
        outcome = _outcome_from_hit(p, table, hit, px, py, dx, dy)
        if not isinstance(outcome, PhasePoint):
            terminated = outcome
            break
        i, _, s = hit
        g = iso_compose(g, table.reflections[i])
        j = i
        theta = outcome.theta
        if renorm_every and count % renorm_every == 0:
            g = iso_orthonormalize(g)
            refreshed = _renormalize(table, g, i, x0, y0, dx0, dy0)
            if refreshed is not None:
                s, theta = refreshed
                outcome = PhasePoint(i + 1, s, theta)
            c, sn = math.cos(theta), math.sin(theta)
            dx = c * table.nx[j] + sn * table.tx[j]
            dy = c * table.ny[j] + sn * table.ty[j]
            # restart the unfolding from here so its coordinates stay small
            x0 = table.ax[j] + s * table.tx[j]
            y0 = table.ay[j] + s * table.ty[j]
            dx0, dy0 = dx, dy
            g = IDENTITY
        else:
            dn = dx * table.nx[j] + dy * table.ny[j]
            dx -= 2.0 * dn * table.nx[j]
            dy -= 2.0 * dn * table.ny[j]
        px = table.ax[j] + s * table.tx[j]
        py = table.ay[j] + s * table.ty[j]
        points.append(outcome)
        directions.append(math.atan2(dy, dx))

    return Orbit(p, points, directions, terminated)


def _renormalize(table: _SideTable, g: Iso, i: int,
                 x0: float, y0: float, dx0: float, dy0: float):
    """Exact (position, theta) of the current bounce from the unfolded line.

    The current bounce point is the intersection of the fixed unfolded ray
    with the image of side ``i`` under the cumulative reflection ``g``.
    """
    a = iso_apply(g, (table.ax[i], table.ay[i]))
    tvec = iso_apply(g, (table.ax[i] + table.tx[i], table.ay[i] + table.ty[i]))
    ux, uy = tvec[0] - a[0], tvec[1] - a[1]
    den = ux * dy0 - uy * dx0
    if abs(den) < 1e-15:
        return None
    s = (dx0 * (a[1] - y0) - dy0 * (a[0] - x0)) / den
    if not 0.0 < s < table.L[i]:
        return None
    # local outgoing direction: pull the fixed plane direction back through
    # the unfolded copy *after* this bounce (g already includes it)
    lx, ly = iso_apply_vector_inverse(g, (dx0, dy0))
    theta = math.atan2(lx * table.tx[i] + ly * table.ty[i],
                       lx * table.nx[i] + ly * table.ny[i])
    if abs(theta) >= _HALF_PI:
        return None
    return s, theta


def rho(u: PhasePoint, v: PhasePoint) -> tuple[float, float, float]:
    """Phase-space distances ``(rho1, rho2, rho)``.

    ``rho1`` is the arc-length distance along a common side (``inf`` when
    the points sit on different sides), ``rho2`` the direction distance,
    and ``rho`` their maximum.
    """
    rho2 = abs(u.theta - v.theta)
    if u.side != v.side:
        return (math.inf, rho2, math.inf)
    rho1 = abs(u.position - v.position)
    return (rho1, rho2, max(rho1, rho2))


def cluster_directions(values, tol: float = 1e-9):
    """Cluster angles on the circle: ``(representatives, labels)``.

    Sorted-gap clustering with wraparound merging; adequate because the
    direction values of an orbit are tight clumps (float drift around the
    finitely many exact directions) separated by much more than ``tol``.
    """
    arr = np.asarray(values, dtype=float) % (2.0 * math.pi)
    n = len(arr)
    if n == 0:
        return [], np.zeros(0, dtype=int)
    order = np.argsort(arr, kind="stable")
    srt = arr[order]
    breaks = np.nonzero(np.diff(srt) > tol)[0]
    starts = np.concatenate(([0], breaks + 1))
    labels_sorted = np.searchsorted(starts, np.arange(n), side="right") - 1
    n_clusters = len(starts)
    if n_clusters > 1 and (srt[0] + 2.0 * math.pi - srt[-1]) <= tol:
        labels_sorted[labels_sorted == n_clusters - 1] = 0
        starts = starts[:-1]
        n_clusters -= 1
    labels = np.empty(n, dtype=int)
    labels[order] = labels_sorted
    reps = [float(srt[s]) for s in starts]
    return reps, labels


def floor_directions(o: Orbit, tol: float = 1e-9) -> list[float]:
    """Distinct plane directions along the orbit, clustered within ``tol``."""
    reps, _ = cluster_directions(o.directions, tol)
    return sorted(reps)


def floor_count(p: Polygon, o: Orbit, tol: float = 1e-9) -> int:
    """Number of distinct free-flight directions visited by the orbit."""
    if not o.points:
        raise ValueError("orbit is empty")
    return len(floor_directions(o, tol))


def time_reversed(p: Polygon, o: Orbit) -> Orbit:
    """The orbit traversed backwards (thetas negated, order reversed).

    Only meaningful for orbits that did not terminate; the reversed list is
    itself a valid forward orbit of the billiard map.
    """
    if o.terminated is not None:
        raise ValueError("cannot time-reverse a terminated orbit")
    pts = [PhasePoint(u.side, u.position, -u.theta) for u in reversed(o.points)]
    dirs = [plane_direction(p, u) for u in pts]
    return Orbit(p, pts, dirs, None)


def orbit_csv_lines(o: Orbit, header_comments: Sequence[str] = ()) -> list[str]:
    """Deterministic CSV rows ``n, side, position, theta, direction, x, y``."""
    lines = [f"# {c}" for c in header_comments]
    lines.append("n,sideIndex,position,theta,planeDirection,x,y")
    for n, u in enumerate(o.points):
        x, y = o.polygon.boundary_to_plane(u.boundary_point())
        lines.append(f"{n},{u.side},{u.position:.17g},{u.theta:.17g},"
                     f"{o.directions[n]:.17g},{x:.17g},{y:.17g}")
    if o.terminated is not None:
        if isinstance(o.terminated, CornerHit):
            flag = "tolerance-limited" if o.terminated.tolerance_limited else "exact"
            lines.append(f"# terminated: corner {o.terminated.corner} ({flag})")
        else:
            lines.append(f"# terminated: tangency along side {o.terminated.side}")
    return lines
