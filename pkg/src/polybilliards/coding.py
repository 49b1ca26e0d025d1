"""Symbolic itineraries: codes, prefix cells, separation, circular order.

The code of an orbit is the sequence of side indices it visits, starting
with the side the initial point sits on.  The set of initial conditions on
a fixed side sharing a given code prefix is, in the coordinates
``(position, tan theta)``, an intersection of half-planes: the unfolded
initial ray must pass between the unfolded images of each crossed side's
endpoints.  Working with ``tan theta`` keeps every constraint linear, so
the cell stays exactly convex; angles are recovered by ``atan`` only at
the cell boundary.

The cell closure contains every initial condition with an infinite forward
orbit and the same prefix, so the deviation suprema computed from it upper
bound the true prefix-cell deviations (the difference is a measure-zero
boundary set).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .dynamics import Orbit, PhasePoint, iterate
from .geometry import Polygon
from .planar import Iso, IDENTITY, iso_apply, iso_compose, segments_cross

_W_BOUND = 1e12  # tan(theta) box; atan saturates at pi/2 well before this


class DegenerateCellError(ValueError):
    """Prefix cell has empty interior (exact corner alignment)."""


@dataclass(frozen=True)
class Code:
    """A finite side-index itinerary; ``complete`` is False when the orbit
    ended in a corner hit or tangency before the requested length."""

    symbols: tuple[int, ...]
    complete: bool

    def __len__(self) -> int:
        return len(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]


def code_of(p: Polygon, u: PhasePoint, n: int) -> Code:
    """First ``n`` symbols of the forward itinerary of ``u``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return Code((), True)
    orbit = iterate(p, u, n - 1)
    return code_from_orbit(orbit, n)


def code_from_orbit(o: Orbit, n: Optional[int] = None) -> Code:
    symbols = o.code_symbols()
    if n is not None:
        symbols = symbols[:n]
        return Code(symbols, len(symbols) == n)
    return Code(symbols, o.terminated is None)


def _symbols(c: Union[Code, Sequence[int]]) -> tuple[int, ...]:
    if isinstance(c, Code):
        return c.symbols
    return tuple(c)


def separation_index(a: Union[Code, Sequence[int]],
                     b: Union[Code, Sequence[int]]) -> Optional[int]:
    """Least index ``l >= 1`` where the codes disagree, None if they never
    do within the common length.  The codes must share their first symbol."""
    sa, sb = _symbols(a), _symbols(b)
    if not sa or not sb:
        raise ValueError("codes must be nonempty")
    if sa[0] != sb[0]:
        raise ValueError("codes do not share their first symbol")
    for i in range(1, min(len(sa), len(sb))):
        if sa[i] != sb[i]:
            return i
    return None


@dataclass(frozen=True)
class GapStats:
    """Return times of an initial code word and the syndeticity estimate."""

    prefix: tuple[int, ...]
    returns: tuple[int, ...]
    max_gap: Optional[int]

    @property
    def count(self) -> int:
        return len(self.returns)


def recurrence_gaps(c: Union[Code, Sequence[int]], m: int) -> GapStats:
    """Indices ``n >= 1`` where the first ``m`` symbols recur, plus the
    largest gap between consecutive occurrences (the occurrence at 0
    included as the baseline)."""
    symbols = _symbols(c)
    if m < 1 or m > len(symbols):
        raise ValueError(f"prefix length {m} out of range 1..{len(symbols)}")
    prefix = symbols[:m]
    returns = tuple(n for n in range(1, len(symbols) - m + 1)
                    if symbols[n:n + m] == prefix)
    if returns:
        occ = (0,) + returns
        max_gap = max(b - a for a, b in zip(occ, occ[1:]))
    else:
        max_gap = None
    return GapStats(prefix, returns, max_gap)


# -- prefix cells ---------------------------------------------------------------


@dataclass(frozen=True)
class HalfPlane:
    """Constraint ``a*position + b*tan_theta + c >= 0``."""

    a: float
    b: float
    c: float

    def value(self, s: float, w: float) -> float:
        return self.a * s + self.b * w + self.c


@dataclass
class PrefixCell:
    """Convex region of initial conditions sharing an ``m``-symbol prefix.

    Coordinates are ``(position on the starting side, tan theta)``.  The
    ``vertices`` polygon is the constraint intersection clipped to a large
    ``tan theta`` box; ``degenerate`` marks empty-interior cells, which
    occur only at exact corner alignments.
    """

    side: int
    depth: int
    halfplanes: list[HalfPlane]
    vertices: list[tuple[float, float]]
    degenerate: bool

    def contains(self, s: float, w: float, slack: float = 1e-9) -> bool:
        return all(h.value(s, w) >= -slack for h in self.halfplanes)

    def position_interval(self) -> tuple[float, float]:
        ss = [v[0] for v in self.vertices]
        return (min(ss), max(ss))

    def tan_theta_interval(self) -> tuple[float, float]:
        ws = [v[1] for v in self.vertices]
        return (min(ws), max(ws))


def _clip(polygon: list[tuple[float, float]],
          h: HalfPlane) -> list[tuple[float, float]]:
    """Sutherland-Hodgman clip of a convex polygon against ``h.value >= 0``."""
    if not polygon:
        return []
    out: list[tuple[float, float]] = []
    prev = polygon[-1]
    fprev = h.value(*prev)
    for cur in polygon:
        fcur = h.value(*cur)
        if fcur >= 0.0:
            if fprev < 0.0:
                t = fprev / (fprev - fcur)
                out.append((prev[0] + t * (cur[0] - prev[0]),
                            prev[1] + t * (cur[1] - prev[1])))
            out.append(cur)
        elif fprev >= 0.0:
            t = fprev / (fprev - fcur)
            out.append((prev[0] + t * (cur[0] - prev[0]),
                        prev[1] + t * (cur[1] - prev[1])))
        prev, fprev = cur, fcur
    return out


class _CellBuilder:
    """Incremental prefix-cell construction along an orbit's code."""

    def __init__(self, p: Polygon, u: PhasePoint, orbit: Orbit):
        self.p = p
        self.u = u
        self.orbit = orbit
        self.s_u = u.position
        self.w_u = math.tan(u.theta)
        j = u.side
        self.origin = p.corner(j)
        self.tx, self.ty = p.tangent(j)
        self.nx, self.ny = p.inward_normal(j)
        L = p.side_length(j)
        self.halfplanes: list[HalfPlane] = [HalfPlane(1.0, 0.0, 0.0),
                                            HalfPlane(-1.0, 0.0, L)]
        self.vertices: list[tuple[float, float]] = [
            (0.0, -_W_BOUND), (L, -_W_BOUND), (L, _W_BOUND), (0.0, _W_BOUND)]
        self.degenerate = False
        self.g: Iso = IDENTITY
        self.depth = 1
        self.reflex = [i for i in range(1, len(p) + 1) if p.is_reflex(i)]
        self._table = None

    def _frame(self, pt) -> tuple[float, float]:
        dx, dy = pt[0] - self.origin[0], pt[1] - self.origin[1]
        return (dx * self.tx + dy * self.ty, dx * self.nx + dy * self.ny)

    def _signed_constraint(self, z: tuple[float, float]) -> Optional[HalfPlane]:
        # ray through (s, 0) with direction (w, 1) in side-frame coordinates;
        # the point z lies left of it iff  s + w*zy - zx >= 0
        zx, zy = z
        f_u = self.s_u + self.w_u * zy - zx
        if abs(f_u) < 1e-13:
            self.degenerate = True
            return None
        sign = 1.0 if f_u > 0.0 else -1.0
        return HalfPlane(sign, sign * zy, -sign * zx)

    def _add(self, h: Optional[HalfPlane]) -> None:
        if h is None:
            return
        self.halfplanes.append(h)
        self.vertices = _clip(self.vertices, h)
        if len(self.vertices) < 3:
            self.degenerate = True

    def extend_to(self, m: int) -> None:
        """Add constraints until the cell encodes the ``m``-symbol prefix."""
        from .dynamics import _side_table
        if self._table is None:
            self._table = _side_table(self.p)
        table = self._table
        while self.depth < m:
            i = self.depth  # crossing i leads to the point with symbol sigma_i
            side = self.orbit.points[i].side
            a, b = self.p.side(side)
            for reflex_corner in self.reflex:
                z = self._frame(iso_apply(self.g, self.p.corner(reflex_corner)))
                self._add(self._signed_constraint(z))
            za = self._frame(iso_apply(self.g, a))
            zb = self._frame(iso_apply(self.g, b))
            ha = self._signed_constraint(za)
            hb = self._signed_constraint(zb)
            if ha is not None and hb is not None and ha.a == hb.a:
                # the ray must pass *between* the endpoint images
                self.degenerate = True
            self._add(ha)
            self._add(hb)
            self.g = iso_compose(self.g, table.reflections[side - 1])
            self.depth += 1

    def cell(self) -> PrefixCell:
        return PrefixCell(self.u.side, self.depth, list(self.halfplanes),
                          list(self.vertices), self.degenerate)


def prefix_cell(p: Polygon, u: PhasePoint, m: int,
                orbit: Optional[Orbit] = None) -> PrefixCell:
    """The set of starts on ``u``'s side sharing its ``m``-symbol prefix.

    Returned as half-plane constraints (and their clipped polygon) in
    ``(position, tan theta)``.  For non-convex polygons, images of reflex
    corners contribute constraints as well: a start whose unfolded ray
    passes on the far side of a blocking reflex corner hits that corner's
    sides first, changing the code.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if orbit is None:
        orbit = iterate(p, u, m - 1)
    if len(orbit) < m:
        raise ValueError(f"orbit has only {len(orbit)} symbols, need {m}")
    builder = _CellBuilder(p, u, orbit)
    builder.extend_to(m)
    return builder.cell()


@dataclass(frozen=True)
class EpsilonReport:
    """Worst-case deviation of same-prefix starts from the reference start.

    ``eps1`` bounds the position deviation, ``eps2`` the direction
    deviation (radians); ``eps`` is their maximum.  Non-increasing in the
    prefix length ``m`` since constraints only accumulate.
    """

    m: int
    eps1: float
    eps2: float

    @property
    def eps(self) -> float:
        return max(self.eps1, self.eps2)


def _report_from_cell(cell: PrefixCell, u: PhasePoint, m: int) -> EpsilonReport:
    if cell.degenerate or not cell.vertices:
        raise DegenerateCellError(f"prefix cell at depth {m} is degenerate")
    eps1 = max(abs(v[0] - u.position) for v in cell.vertices)
    eps2 = max(abs(math.atan(v[1]) - u.theta) for v in cell.vertices)
    return EpsilonReport(m, eps1, eps2)


def epsilon(p: Polygon, u: PhasePoint, m: int) -> EpsilonReport:
    """Deviation suprema over the depth-``m`` prefix cell of ``u``."""
    cell = prefix_cell(p, u, m)
    return _report_from_cell(cell, u, m)


def epsilon_profile(p: Polygon, u: PhasePoint,
                    depths: Sequence[int]) -> list[EpsilonReport]:
    """Epsilon reports at several prefix depths, sharing one cell build."""
    if not depths:
        return []
    depths = sorted(set(int(d) for d in depths))
    if depths[0] < 1:
        raise ValueError("depths must be >= 1")
    orbit = iterate(p, u, depths[-1] - 1)
    if len(orbit) < depths[-1]:
        raise ValueError(f"orbit has only {len(orbit)} symbols, "
                         f"need {depths[-1]}")
    builder = _CellBuilder(p, u, orbit)
    out = []
    for m in depths:
        builder.extend_to(m)
        out.append(_report_from_cell(builder.cell(), u, m))
    return out


# -- trajectory intersection before separation ----------------------------------


@dataclass(frozen=True)
class IntersectionReport:
    """Outcome of the intersect-before-separation test (forward variant).

    ``separation`` is the symbolic separation index of the two codes (None
    when they agree over the whole common window, in which case
    ``separation_observed`` is False and the crossing search still covers
    the window).  ``crosses`` reports whether some pair of free-flight
    segments with equal history crossed, with ``k0`` the earliest index.
    """

    crosses: bool
    k0: Optional[int]
    separation: Optional[int]
    separation_observed: bool


def intersect_before_separation(p: Polygon, o1: Orbit, o2: Orbit) -> IntersectionReport:
    """Do two orbits' trajectories cross before their codes separate?

    Only segment pairs ``k0 < separation`` are examined, per the forward
    case of the definition; the backward case is obtained by feeding
    time-reversed orbits (see :func:`polybilliards.dynamics.time_reversed`).
    """
    c1, c2 = o1.code_symbols(), o2.code_symbols()
    if not c1 or not c2:
        raise ValueError("orbits must be nonempty")
    if c1[0] != c2[0]:
        raise ValueError("orbits do not start on the same side")
    n = min(len(c1), len(c2))
    sep = None
    for i in range(1, n):
        if c1[i] != c2[i]:
            sep = i
            break
    limit = sep if sep is not None else n - 1
    pts1 = o1.bounce_plane_points()
    pts2 = o2.bounce_plane_points()
    for k0 in range(limit):
        if segments_cross(pts1[k0], pts1[k0 + 1], pts2[k0], pts2[k0 + 1]):
            return IntersectionReport(True, k0, sep, sep is not None)
    return IntersectionReport(False, None, sep, sep is not None)


# -- combinatorial order ---------------------------------------------------------


def _circular_positions(xs: Sequence[float]) -> list[float]:
    return [float(x) % 1.0 for x in xs]


def _check_duplicates(xs: Sequence[float], tol: float) -> None:
    n = len(xs)
    if n < 2:
        return
    srt = sorted(xs)
    for a, b in zip(srt, srt[1:]):
        if b - a < tol:
            raise ValueError(f"duplicate circular points within {tol}")
    if (srt[0] + 1.0) - srt[-1] < tol:
        raise ValueError(f"duplicate circular points within {tol}")


def same_combinatorial_order(xs: Sequence[float], ys: Sequence[float],
                             tol: float = 1e-12) -> bool:
    """Whether two circular point sequences have the same combinatorial order.

    Points are circular coordinates in ``[0, 1)`` (e.g. boundary arc length
    over the perimeter).  The sequences have the same combinatorial order
    when for every index triple ``(k, l, m)`` membership of ``x_k`` in the
    closed counterclockwise arc from ``x_l`` to ``x_m`` matches membership
    of ``y_k`` in the arc from ``y_l`` to ``y_m``.  For duplicate-free
    sequences this is equivalent to equality of the circular rank
    permutations anchored at index 0, which is what this comparator checks;
    :func:`same_combinatorial_order_naive` is the direct all-triples oracle.
    """
    if len(xs) != len(ys):
        raise ValueError("sequences must have equal length")
    ax, ay = _circular_positions(xs), _circular_positions(ys)
    _check_duplicates(ax, tol)
    _check_duplicates(ay, tol)
    n = len(ax)
    if n <= 2:
        return True
    x0, y0 = ax[0], ay[0]
    order_x = sorted(range(n), key=lambda i: (ax[i] - x0) % 1.0)
    order_y = sorted(range(n), key=lambda i: (ay[i] - y0) % 1.0)
    return order_x == order_y


def same_combinatorial_order_naive(xs: Sequence[float], ys: Sequence[float],
                                   tol: float = 1e-12) -> bool:
    """All-triples combinatorial order check (vectorized over k, l, m).

    Literal transcription of the definition: ``x_k in [x_l, x_m]`` iff the
    counterclockwise distance from ``x_l`` to ``x_k`` is at most the one
    from ``x_l`` to ``x_m``.  Cubic in the sequence length; kept as the
    independent oracle for the optimized comparator.
    """
    if len(xs) != len(ys):
        raise ValueError("sequences must have equal length")
    ax, ay = _circular_positions(xs), _circular_positions(ys)
    _check_duplicates(ax, tol)
    _check_duplicates(ay, tol)
    n = len(ax)
    if n <= 2:
        return True
    dx = (np.asarray(ax)[:, None] - np.asarray(ax)[None, :]) % 1.0
    dy = (np.asarray(ay)[:, None] - np.asarray(ay)[None, :]) % 1.0
    mx = dx[:, :, None] <= dx.T[None, :, :]
    my = dy[:, :, None] <= dy.T[None, :, :]
    return bool(np.array_equal(mx, my))
