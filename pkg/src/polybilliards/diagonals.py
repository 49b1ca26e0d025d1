"""Enumeration of generalized diagonals and exceptional-direction tests.

A generalized diagonal is a billiard trajectory running from a corner to a
corner with no corner hit in between.  Unfolding turns the search into
plane visibility: from the (fixed) start corner, explore the tree of
crossed-side sequences; the directions realizing a given sequence form an
angular interval, and a diagonal is found whenever the unfolded image of a
corner is visible inside the open interval.

Sides themselves do not count as diagonals (a trajectory along a side is
tangent, hence undefined), and a diagonal passing through an intermediate
corner is split there: only corner-free interiors are emitted.  Directions
through corner images bound the search intervals, which enforces both
rules.  Within an interval between consecutive corner-image directions the
first crossed side cannot change, so one midpoint probe per interval
decides the recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .geometry import Polygon
from .planar import (Iso, IDENTITY, iso_apply, iso_compose,
                     line_angle_distance)

_MARGIN = 1e-12


@dataclass(frozen=True)
class GeneralizedDiagonal:
    """A corner-to-corner trajectory: code word, direction, length."""

    start_corner: int
    end_corner: int
    code_word: tuple[int, ...]   # sides bounced off strictly between the corners
    direction: float             # plane angle of the first segment
    length: float                # Euclidean length of the unfolded chord

    @property
    def segments(self) -> int:
        return len(self.code_word) + 1


def _first_hit(p: Polygon, g: Iso, ox: float, oy: float,
               dx: float, dy: float, t_min: float) -> Optional[tuple[int, float]]:
    """Nearest crossing of ray with the ``g``-image of the polygon boundary.

    Only crossings strictly beyond ``t_min`` count (earlier ones belong to
    previously traversed copies).  Returns ``(side, t)``.
    """
    best: Optional[tuple[int, float]] = None
    k = len(p)
    corners = [iso_apply(g, p.corner(i + 1)) for i in range(k)]
    for i in range(k):
        ax, ay = corners[i]
        bx, by = corners[(i + 1) % k]
        ux, uy = bx - ax, by - ay
        den = ux * dy - uy * dx
        if den == 0.0:
            continue
        wx, wy = ax - ox, ay - oy
        t = (ux * wy - uy * wx) / den
        if t <= t_min or (best is not None and t >= best[1]):
            continue
        s = (dx * wy - dy * wx) / den
        if 0.0 <= s <= 1.0:
            best = (i + 1, t)
    return best


def _search(p: Polygon, start: int, x0: float, y0: float,
            g: Iso, lo: float, hi: float, word: tuple[int, ...],
            max_segments: int, out: list[GeneralizedDiagonal]) -> None:
    k = len(p)
    depth = len(word)

    # angular events: unfolded corner images inside the open interval
    events = []
    for q in range(1, k + 1):
        cx, cy = iso_apply(g, p.corner(q))
        dist = math.hypot(cx - x0, cy - y0)
        if dist <= p.tol.coord_snap:
            continue
        phi = math.atan2(cy - y0, cx - x0)
        # unwrap into [lo, lo + 2*pi)
        phi = lo + math.fmod(phi - lo, 2.0 * math.pi)
        if phi < lo:
            phi += 2.0 * math.pi
        if lo + _MARGIN < phi < hi - _MARGIN:
            events.append((phi, q, dist, cx, cy))
    events.sort()

    # emit diagonals: corner images visible past the corridor entrance
    if depth + 1 <= max_segments:
        for phi, q, dist, cx, cy in events:
            dx, dy = math.cos(phi), math.sin(phi)
            t_min = _entry_distance(p, g, word, x0, y0, dx, dy)
            if dist <= t_min + _MARGIN:
                continue  # image lies before the corridor entrance
            hit = _first_hit(p, g, x0, y0, dx, dy, t_min + _MARGIN)
            if hit is not None and hit[1] < dist - p.tol.coord_snap:
                continue  # a side of the current copy occludes the corner
            out.append(GeneralizedDiagonal(start, q, word, phi, dist))

    # recurse: between consecutive events the first crossed side is constant
    if depth + 1 <= max_segments - 1:
        bounds = [lo] + [e[0] for e in events] + [hi]
        for a, b in zip(bounds, bounds[1:]):
            if b - a <= 2.0 * _MARGIN:
                continue
            mid = 0.5 * (a + b)
            dx, dy = math.cos(mid), math.sin(mid)
            t_min = _entry_distance(p, g, word, x0, y0, dx, dy)
            hit = _first_hit(p, g, x0, y0, dx, dy, t_min + _MARGIN)
            if hit is None:
                continue
            side, _ = hit
            g_next = iso_compose(g, _reflection(p, side))
            _search(p, start, x0, y0, g_next, a, b, word + (side,),
                    max_segments, out)


def _reflection(p: Polygon, side: int) -> Iso:
    from .dynamics import _side_table
    return _side_table(p).reflections[side - 1]


def _entry_distance(p: Polygon, g_current: Iso, word: tuple[int, ...],
                    x0: float, y0: float, dx: float, dy: float) -> float:
    """Ray distance at which the corridor enters the current copy.

    That is the crossing of the last unfolded side on the word (0 at the
    start corner).  ``g_current`` already includes the last reflection,
    which fixes the crossed side pointwise, so the side's image can be
    taken under ``g_current`` itself.
    """
    if not word:
        return 0.0
    side = word[-1]
    a = iso_apply(g_current, p.corner(side))
    b = iso_apply(g_current, p.corner(p.wrap(side + 1)))
    ux, uy = b[0] - a[0], b[1] - a[1]
    den = ux * dy - uy * dx
    if den == 0.0:
        return 0.0
    return (ux * (a[1] - y0) - uy * (a[0] - x0)) / den


def enumerate_diagonals(p: Polygon, max_segments: int) -> list[GeneralizedDiagonal]:
    """All generalized diagonals with at most ``max_segments`` segments.

    Complete up to the segment bound; deduplicated by (start corner, code
    word) and sorted deterministically.  Every diagonal's reverse (swapped
    endpoints, reversed word) is emitted as well, from its own start corner.
    """
    if max_segments < 1:
        raise ValueError("max_segments must be >= 1")
    found: list[GeneralizedDiagonal] = []
    for c in range(1, len(p) + 1):
        x0, y0 = p.corner(c)
        lo = p.side_angle(c)
        hi = lo + p.interior_angle(c)
        _search(p, c, x0, y0, IDENTITY, lo, hi, (), max_segments, found)
    unique: dict[tuple[int, tuple[int, ...], int], GeneralizedDiagonal] = {}
    for d in found:
        unique.setdefault((d.start_corner, d.code_word, d.end_corner), d)
    return sorted(unique.values(),
                  key=lambda d: (d.start_corner, d.segments, d.code_word,
                                 d.end_corner))


@lru_cache(maxsize=64)
def _cached_diagonals(p: Polygon, max_segments: int) -> tuple[GeneralizedDiagonal, ...]:
    return tuple(enumerate_diagonals(p, max_segments))


@dataclass(frozen=True)
class ExceptionalVerdict:
    """Outcome of the exceptional-direction test at enumeration depth ``L``.

    ``exceptional`` means the direction is parallel (mod pi) to a diagonal
    with at most ``L`` segments.  A clear verdict is *not* a proof of
    non-exceptionality: the exceptional set is countable and dense, so it
    only certifies the absence of short diagonals in that direction.
    """

    exceptional: bool
    depth: int
    witness: Optional[GeneralizedDiagonal]

    def __bool__(self) -> bool:
        return self.exceptional


def is_exceptional(p: Polygon, theta: float, max_segments: int,
                   tol: Optional[float] = None) -> ExceptionalVerdict:
    """Is the plane direction ``theta`` parallel to a short diagonal?"""
    tol = p.tol.angle_tol if tol is None else tol
    for d in _cached_diagonals(p, max_segments):
        if line_angle_distance(d.direction, theta) <= tol:
            return ExceptionalVerdict(True, max_segments, d)
    return ExceptionalVerdict(False, max_segments, None)


def retrace_code(p: Polygon, d: GeneralizedDiagonal,
                 offset: float = 1e-7) -> tuple[tuple[int, ...], Optional[int]]:
    """Re-run a diagonal through the billiard map from just inside its start.

    Casts from a point ``offset`` along the first segment; returns the side
    sequence observed and the corner eventually hit (None if the orbit
    failed to terminate within the expected number of steps).  Emitted
    diagonals must reproduce their code word and end corner.
    """
    from .dynamics import CornerHit, PhasePoint, _outcome_from_hit, _side_table, iterate

    table = _side_table(p)
    x0, y0 = p.corner(d.start_corner)
    dx, dy = math.cos(d.direction), math.sin(d.direction)
    px, py = x0 + offset * dx, y0 + offset * dy
    if not d.code_word:
        hit = table.cast(px, py, dx, dy, -1)
        if hit is None:
            return ((), None)
        outcome = _outcome_from_hit(p, table, hit, px, py, dx, dy)
        return ((), outcome.corner if isinstance(outcome, CornerHit) else None)
    # first bounce by direct cast, then the plain billiard map
    hit = table.cast(px, py, dx, dy, -1)
    if hit is None:
        return ((), None)
    outcome = _outcome_from_hit(p, table, hit, px, py, dx, dy)
    if isinstance(outcome, CornerHit):
        return ((), outcome.corner)
    if not isinstance(outcome, PhasePoint):
        return ((), None)
    orbit = iterate(p, outcome, len(d.code_word))
    sides = orbit.code_symbols()
    corner = orbit.terminated.corner if isinstance(orbit.terminated, CornerHit) else None
    return (sides, corner)
