"""Unfolding of billiard orbits to straight lines.

Instead of reflecting the trajectory in a side one may reflect the polygon
in that side and continue the trajectory straight.  Composing the per-side
reflections in code order gives, for every free-flight segment, an isometry
from polygon coordinates to the unfolded plane; all bounce points then lie
on one line.

Two consumers:

* :func:`unfold` turns an already-computed orbit into its reflection chain
  (with a collinearity certificate);
* :func:`unfolded_orbit` *integrates* the orbit directly in the unfolded
  picture: the fixed initial ray is intersected with transformed side
  images, never with reflected directions.  This is an independent
  implementation of the dynamics used to cross-check step iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .dynamics import (CornerHit, Orbit, PhasePoint, Tangency, _EXACT_CORNER,
                       _GRAZING, _T_MIN, check_phase_point, direction_vector,
                       _side_table)
from .geometry import Polygon
from .planar import (Iso, IDENTITY, iso_apply, iso_apply_vector_inverse,
                     iso_compose, iso_orthonormalize)

_HALF_PI = math.pi / 2.0


@dataclass
class UnfoldedPath:
    """Reflection chain of an orbit plus its straight unfolded ray.

    ``isometries[i]`` maps the polygon onto the copy containing unfolded
    segment ``i`` (``isometries[0]`` is the identity).  ``crossed_sides``
    lists the sides reflected through, i.e. the orbit code without its
    first symbol.
    """

    polygon: Polygon
    origin: tuple[float, float]
    direction: tuple[float, float]
    isometries: list[Iso]
    crossed_sides: list[int]

    def unfolded_bounce_points(self, orbit: Orbit) -> list[tuple[float, float]]:
        pts = []
        for i, u in enumerate(orbit.points):
            g = self.isometries[min(i, len(self.isometries) - 1)]
            pts.append(iso_apply(g, orbit.polygon.boundary_to_plane(u.boundary_point())))
        return pts

    def max_line_deviation(self, orbit: Orbit) -> float:
        """Largest distance of an unfolded bounce point from the straight line."""
        ox, oy = self.origin
        dx, dy = self.direction
        worst = 0.0
        for x, y in self.unfolded_bounce_points(orbit):
            worst = max(worst, abs((x - ox) * dy - (y - oy) * dx))
        return worst


def unfold(p: Polygon, orbit: Orbit) -> UnfoldedPath:
    """Reflection chain collinearizing the orbit's bounce points."""
    if not orbit.points:
        raise ValueError("orbit is empty")
    table = _side_table(p)
    origin = p.boundary_to_plane(orbit.start.boundary_point())
    direction = direction_vector(p, orbit.start)
    isometries: list[Iso] = [IDENTITY]
    crossed: list[int] = []
    for u in orbit.points[1:]:
        crossed.append(u.side)
        isometries.append(iso_compose(isometries[-1],
                                      table.reflections[u.side - 1]))
    return UnfoldedPath(p, origin, direction, isometries, crossed)


def unfolded_orbit(p: Polygon, u: PhasePoint, n: int,
                   renorm_every: int = 4096) -> Orbit:
    """Orbit of ``u`` computed entirely from the unfolded straight ray.

    At every step the fixed initial ray is intersected with the images of
    the polygon's sides under the cumulative reflection isometry; the next
    crossing determines the side hit, and local coordinates are pulled back
    through the isometry.  Produces the same :class:`Orbit` structure as
    :func:`polybilliards.dynamics.iterate` but shares none of its reflected
    ray-marching, which makes it a genuine cross-check.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    check_phase_point(p, u)
    table = _side_table(p)
    k = table.k
    ox, oy = p.boundary_to_plane(u.boundary_point())
    dx, dy = direction_vector(p, u)
    snap = table.snap

    g: Iso = IDENTITY
    t_prev = 0.0
    current = u.side - 1
    points = [u]
    directions = [math.atan2(dy, dx)]
    terminated: Optional[Union[CornerHit, Tangency]] = None

    for count in range(1, n + 1):
        if renorm_every and count % renorm_every == 0:
            g = iso_orthonormalize(g)
        # transform all corners once, reuse per side
        img = [iso_apply(g, (table.ax[i], table.ay[i])) for i in range(k)]
        best = None
        for i in range(k):
            if i == current:
                continue
            a = img[i]
            b = img[(i + 1) % k]
            ux, uy = b[0] - a[0], b[1] - a[1]
            den = ux * dy - uy * dx
            if den == 0.0:
                continue
            wx, wy = a[0] - ox, a[1] - oy
            t = (ux * wy - uy * wx) / den
            if t <= t_prev + _T_MIN or (best is not None and t >= best[1]):
                continue
            s = (dx * wy - dy * wx) / den
            s *= table.L[i]  # den math used unit span: rescale to arc length
            if -snap <= s <= table.L[i] + snap:
                best = (i, t, s)
        if best is None:
            raise ArithmeticError("unfolded ray escaped; geometry is degenerate")
        i, t, s = best
        L = table.L[i]
        if s <= snap or s >= L - snap:
            corner0 = i if s <= snap else (i + 1) % k
            cx, cy = img[corner0]
            miss = abs((cx - ox) * dy - (cy - oy) * dx)
            terminated = CornerHit(corner0 + 1, miss, miss > _EXACT_CORNER)
            break
        g = iso_compose(g, table.reflections[i])
        lx, ly = iso_apply_vector_inverse(g, (dx, dy))
        theta = math.atan2(lx * table.tx[i] + ly * table.ty[i],
                           lx * table.nx[i] + ly * table.ny[i])
        if abs(theta) >= _HALF_PI - _GRAZING:
            terminated = Tangency(i + 1)
            break
        t_prev = t
        current = i
        points.append(PhasePoint(i + 1, s, theta))
        directions.append(math.atan2(ly, lx))

    return Orbit(p, points, directions, terminated)
