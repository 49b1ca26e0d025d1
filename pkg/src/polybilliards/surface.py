"""Dihedral direction orbits, the invariant flat surface, and its skeleton.

In a rational polygon (angles ``pi*m_i/n_i``, ``N = lcm(n_i)``) every
trajectory direction lies in one orbit of the dihedral group generated by
reflections in the side directions.  Gluing ``2N`` copies of the polygon
along equal sides according to that action produces a closed flat surface
whose cone points sit over the polygon corners: ``2*n_i`` copies meet over
corner ``i`` with total angle ``2*pi*m_i``.

Group elements are parameterized as pairs ``(sign, shift)`` acting on a
plane angle ``phi`` by ``phi -> alpha1 + sign*(phi - alpha1) + 2*pi*shift/N``
where ``alpha1`` is the direction of side 1.  Reflection in side ``e``
(whose line makes the exact angle ``pi*c_e/N`` with side 1) maps
``(sign, shift)`` to ``(-sign, c_e - shift mod N)``; everything stays exact
in the integers, with a single float carrying the base direction.

The surface is stored as combinatorial gluing data only; theorem-level
checks need nothing beyond the combinatorics, cone data and side lengths.

Measure convention: the edge of the skeleton over side ``e`` crossed in
direction ``psi`` carries the invariant-measure mass ``|e| * cos(t)`` where
``t`` is the crossing angle measured from the side's normal (equivalently
``|e| * |sin(psi - alpha_e)|`` with the angle taken from the side itself):
normal crossings weigh the most, grazing crossings weigh nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .dynamics import Orbit, PhasePoint, cluster_directions, iterate
from .geometry import AngleClass, Polygon, classify_rationality
from .planar import angle_distance, normalize_angle

_TWO_PI = 2.0 * math.pi


def _require_rational(p: Polygon, angle_class: Optional[AngleClass]) -> AngleClass:
    ac = angle_class if angle_class is not None else classify_rationality(p)
    if not ac.is_rational:
        raise ValueError(f"polygon is not rational (classified {ac.kind})")
    return ac


def side_shift_integers(p: Polygon, ac: AngleClass) -> list[int]:
    """Exact integers c_e with side-e line angle = side-1 angle + pi*c_e/N."""
    N = ac.lcm
    heading = Fraction(0)
    shifts = [0]
    for e in range(2, len(p) + 1):
        m, n = ac.fractions[e - 1]  # turn at corner e
        heading += 1 - Fraction(m, n)
        c = (heading * N) % N
        if c.denominator != 1:
            raise ValueError("angle fractions inconsistent with lcm")
        shifts.append(int(c))
    return shifts


@dataclass
class DirectionOrbit:
    """Orbit of a plane direction under the polygon's dihedral group.

    ``angles`` are the distinct direction values (sorted, in ``[0, 2*pi)``);
    ``reflection_table[i][e-1]`` gives the index of the image of
    ``angles[i]`` under reflection in side ``e``.  ``stabilized`` lists the
    angle indices fixed by at least one side reflection (the collapse that
    makes the orbit smaller than ``2N``).
    """

    base: float
    lcm: int
    angles: tuple[float, ...]
    reflection_table: tuple[tuple[int, ...], ...]
    stabilized: tuple[int, ...]
    alpha1: float = field(repr=False)
    delta: float = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.angles)

    @property
    def full(self) -> bool:
        return len(self.angles) == 2 * self.lcm

    def element_angle(self, sign: int, shift: int) -> float:
        return normalize_angle(self.alpha1 + sign * self.delta
                               + _TWO_PI * shift / self.lcm)

    def index_of(self, angle: float, tol: float = 1e-9) -> int:
        for i, a in enumerate(self.angles):
            if angle_distance(a, angle) <= tol:
                return i
        raise ValueError(f"direction {angle} not in the orbit")


def direction_orbit(p: Polygon, theta: float,
                    angle_class: Optional[AngleClass] = None) -> DirectionOrbit:
    """Orbit of plane direction ``theta`` under reflections in the sides."""
    ac = _require_rational(p, angle_class)
    N = ac.lcm
    shifts = side_shift_integers(p, ac)
    alpha1 = p.side_angle(1)
    delta = theta - alpha1

    def angle_of(sign: int, q: int) -> float:
        return normalize_angle(alpha1 + sign * delta + _TWO_PI * q / N)

    # the reflections generate the full dihedral group, so all 2N pairs occur
    pairs = [(1, q) for q in range(N)] + [(-1, q) for q in range(N)]
    angles: list[float] = []
    pair_to_index: dict[tuple[int, int], int] = {}
    for sign, q in pairs:
        a = angle_of(sign, q)
        for i, b in enumerate(angles):
            if angle_distance(a, b) <= 1e-12:
                pair_to_index[(sign, q)] = i
                break
        else:
            pair_to_index[(sign, q)] = len(angles)
            angles.append(a)

    order = sorted(range(len(angles)), key=lambda i: angles[i])
    rank = {old: new for new, old in enumerate(order)}
    sorted_angles = tuple(angles[i] for i in order)
    index_of_pair = {pair: rank[i] for pair, i in pair_to_index.items()}

    table = [[0] * len(p) for _ in sorted_angles]
    seen = [False] * len(sorted_angles)
    for (sign, q), i in index_of_pair.items():
        if seen[i]:
            continue
        seen[i] = True
        for e in range(1, len(p) + 1):
            image = (-sign, (shifts[e - 1] - q) % N)
            table[i][e - 1] = index_of_pair[image]
    stabilized = tuple(i for i, row in enumerate(table)
                       if any(j == i for j in row))
    orbit = DirectionOrbit(theta, N, sorted_angles,
                           tuple(tuple(r) for r in table), stabilized,
                           alpha1, delta)
    if 2 * N % orbit.size != 0:
        raise AssertionError("orbit size must divide 2N")
    return orbit


# -- surface construction --------------------------------------------------------


@dataclass(frozen=True)
class SurfaceCopy:
    index: int
    sign: int          # +1 keeps the polygon's orientation, -1 reverses it
    shift: int
    angle: float       # direction of the construction test angle in this copy

    @property
    def reversed(self) -> bool:
        return self.sign < 0


@dataclass(frozen=True)
class ConePoint:
    """One vertex of the glued surface over polygon corner ``corner``."""

    corner: int
    cycle: tuple[int, ...]      # copy indices in rotation order around the point
    total_angle: float
    m: int
    n: int

    @property
    def copies_meeting(self) -> int:
        return len(self.cycle)


@dataclass
class Surface:
    """Gluing data of the invariant flat surface of a rational polygon."""

    polygon: Polygon
    lcm: int
    fractions: tuple[tuple[int, int], ...]
    test_angle: float
    copies: tuple[SurfaceCopy, ...]
    gluings: dict[tuple[int, int], tuple[int, int]]
    cone_points: tuple[ConePoint, ...]
    euler_characteristic: int
    genus: int

    @property
    def copy_count(self) -> int:
        return len(self.copies)

    def glued_to(self, copy_index: int, side: int) -> tuple[int, int]:
        return self.gluings[(copy_index, side)]

    def copy_angle(self, copy_index: int, orbit: DirectionOrbit) -> float:
        """Direction of ``orbit``'s base angle inside the given copy."""
        c = self.copies[copy_index]
        return orbit.element_angle(c.sign, c.shift)


def _copy_index(sign: int, q: int, N: int) -> int:
    return q if sign > 0 else N + q


def build_surface(p: Polygon,
                  angle_class: Optional[AngleClass] = None) -> Surface:
    """Glue 2N copies of a rational polygon into its invariant flat surface.

    Every structural invariant is checked constructively: the gluing is an
    involutive perfect matching joining oppositely oriented copies, the
    complex is connected, exactly ``2*n_i`` copies meet over corner ``i``
    with total angle ``2*pi*m_i`` and the genus from the Euler
    characteristic is a non-negative integer.
    """
    ac = _require_rational(p, angle_class)
    N = ac.lcm
    k = len(p)
    shifts = side_shift_integers(p, ac)
    alpha1 = p.side_angle(1)
    delta = math.pi / (4 * N)  # strictly inside the fundamental direction sector
    test_angle = normalize_angle(alpha1 + delta)

    copies = []
    for sign in (1, -1):
        for q in range(N):
            copies.append(SurfaceCopy(_copy_index(sign, q, N), sign, q,
                                      normalize_angle(alpha1 + sign * delta
                                                      + _TWO_PI * q / N)))
    copies.sort(key=lambda c: c.index)

    gluings: dict[tuple[int, int], tuple[int, int]] = {}
    for c in copies:
        for e in range(1, k + 1):
            partner = _copy_index(-c.sign, (shifts[e - 1] - c.shift) % N, N)
            gluings[(c.index, e)] = (partner, e)
    for key, val in gluings.items():
        if gluings[val] != key:
            raise AssertionError("gluing is not involutive")
        if copies[key[0]].sign == copies[val[0]].sign:
            raise AssertionError("gluing must join oppositely oriented copies")
        if key == val:
            raise AssertionError("a side glued to itself")

    # connectivity of the copy graph
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for e in range(1, k + 1):
            j = gluings[(i, e)][0]
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != 2 * N:
        raise AssertionError("glued surface is not connected")

    cone_points: list[ConePoint] = []
    for corner in range(1, k + 1):
        side_out = corner                      # side leaving the corner
        side_in = p.wrap(corner - 1)           # side arriving at the corner
        m, n = ac.fractions[corner - 1]
        visited: set[int] = set()
        for c in copies:
            if c.index in visited:
                continue
            cycle = []
            cur = c.index
            use_out = True
            while True:
                cycle.append(cur)
                visited.add(cur)
                cur = gluings[(cur, side_out if use_out else side_in)][0]
                use_out = not use_out
                if cur == c.index and use_out:
                    break
            if len(cycle) != 2 * n:
                raise AssertionError(
                    f"{len(cycle)} copies meet over corner {corner}, expected {2 * n}")
            total = len(cycle) * p.interior_angle(corner)
            if abs(total - _TWO_PI * m) > 1e-9:
                raise AssertionError(
                    f"cone angle over corner {corner} is {total}, expected {_TWO_PI * m}")
            cone_points.append(ConePoint(corner, tuple(cycle), total, m, n))

    V = len(cone_points)
    E = N * k
    F = 2 * N
    chi = V - E + F
    if (2 - chi) % 2 != 0 or (2 - chi) < 0:
        raise AssertionError(f"Euler characteristic {chi} is not of genus form")
    genus = (2 - chi) // 2

    return Surface(p, N, ac.fractions, test_angle, tuple(copies), gluings,
                   tuple(cone_points), chi, genus)


# -- skeleton and its measure -----------------------------------------------------


@dataclass(frozen=True)
class SkeletonEdge:
    """An edge of the glued surface: one side shared by two copies.

    ``mu_length`` is the invariant-measure mass carried by the edge for the
    chosen direction orbit; ``tangent`` flags directions running along the
    side (zero measure).
    """

    side: int
    copy: int
    partner_copy: int
    angle_index: int
    crossing_angle: float
    mu_length: float
    tangent: bool


@dataclass
class Skeleton:
    surface: Surface
    orbit: DirectionOrbit
    edges: tuple[SkeletonEdge, ...]
    total_mu: float


def skeleton(p: Polygon, d: DirectionOrbit,
             surface: Optional[Surface] = None) -> Skeleton:
    """Edges of the glued surface with their measure for direction orbit ``d``."""
    surf = surface if surface is not None else build_surface(p)
    if surf.lcm != d.lcm:
        raise ValueError("direction orbit and surface disagree on the polygon")
    edges = []
    total = 0.0
    for c in surf.copies:
        for e in range(1, len(p) + 1):
            j, _ = surf.gluings[(c.index, e)]
            if j < c.index:
                continue
            psi = surf.copy_angle(c.index, d)
            psi_partner = surf.copy_angle(j, d)
            alpha_e = p.side_angle(e)
            weight = abs(math.sin(psi - alpha_e))
            weight_partner = abs(math.sin(psi_partner - alpha_e))
            if abs(weight - weight_partner) > 1e-9:
                raise AssertionError("edge measure differs between its two copies")
            tangent = weight < 1e-12
            mu = 0.0 if tangent else p.side_length(e) * weight
            edges.append(SkeletonEdge(e, c.index, j, d.index_of(psi),
                                      psi, mu, tangent))
            total += mu
    return Skeleton(surf, d, tuple(edges), total)


def expected_edge_frequencies(skel: Skeleton) -> dict[tuple[int, int], float]:
    """Normalized measure per (side, outgoing direction index) pair.

    For each edge exactly one of its two copy directions points into the
    polygon from the edge's side; a billiard bounce on that side with that
    outgoing direction is a crossing of that edge, so under unique
    ergodicity the empirical bounce frequencies converge to these values.
    """
    p = skel.surface.polygon
    out: dict[tuple[int, int], float] = {}
    for edge in skel.edges:
        for copy_index in (edge.copy, edge.partner_copy):
            psi = skel.surface.copy_angle(copy_index, skel.orbit)
            nx, ny = p.inward_normal(edge.side)
            if math.cos(psi) * nx + math.sin(psi) * ny > 0.0:
                key = (edge.side, skel.orbit.index_of(psi))
                out[key] = out.get(key, 0.0) + \
                    (edge.mu_length / skel.total_mu if skel.total_mu else 0.0)
    return out


# -- empirical measure along orbits ------------------------------------------------


def star_discrepancy(values: Sequence[float]) -> float:
    """Sup-norm discrepancy of points in [0, 1] against the uniform law."""
    arr = np.sort(np.asarray(values, dtype=float))
    n = len(arr)
    if n == 0:
        return 1.0
    up = np.max(np.arange(1, n + 1) / n - arr)
    down = np.max(arr - np.arange(0, n) / n)
    return float(max(up, down))


@dataclass
class BirkhoffReport:
    """Empirical bounce statistics of one orbit.

    ``class_angles`` are the clustered free-flight directions;
    ``frequencies[(side, class_index)]`` the fraction of bounces on that
    side leaving in that direction; ``side_discrepancy[side]`` the star
    discrepancy of the normalized bounce positions on the side; and
    ``histograms[side]`` a fixed-bin position histogram.
    """

    steps: int
    complete: bool
    class_angles: tuple[float, ...]
    frequencies: dict[tuple[int, int], float]
    counts: dict[tuple[int, int], int]
    side_discrepancy: dict[int, float]
    histograms: dict[int, np.ndarray]


def birkhoff_side_distribution(p: Polygon, u: PhasePoint, n: int,
                               bins: int = 64,
                               direction_tol: float = 1e-9,
                               orbit: Optional[Orbit] = None) -> BirkhoffReport:
    """Empirical hit measure per (side, direction class) plus position stats."""
    o = orbit if orbit is not None else iterate(p, u, n)
    reps, labels = cluster_directions(o.directions, direction_tol)
    # reorder clusters by angle for stable reporting
    order = sorted(range(len(reps)), key=lambda i: reps[i])
    rank = {old: new for new, old in enumerate(order)}
    reps = [reps[i] for i in order]

    sides = np.fromiter((pt.side for pt in o.points), dtype=int,
                        count=len(o.points))
    pos = np.fromiter((pt.position for pt in o.points), dtype=float,
                      count=len(o.points))
    counts: dict[tuple[int, int], int] = {}
    positions: dict[int, np.ndarray] = {}
    for s in range(1, len(p) + 1):
        mask = sides == s
        positions[s] = pos[mask] / p.side_length(s)
        for ci in np.unique(labels[mask]):
            counts[(s, rank[int(ci)])] = int(np.sum(labels[mask] == ci))
    total = len(o.points)
    freqs = {key: c / total for key, c in counts.items()}
    disc = {s: star_discrepancy(v) if len(v) else 1.0
            for s, v in positions.items()}
    hists = {s: np.histogram(v, bins=bins, range=(0.0, 1.0))[0]
             for s, v in positions.items()}
    return BirkhoffReport(len(o.points) - 1, o.terminated is None,
                          tuple(reps), freqs, counts, disc, hists)


def compare_to_skeleton(report: BirkhoffReport, skel: Skeleton,
                        match_tol: float = 1e-6) -> float:
    """Largest |empirical - predicted| frequency over all skeleton edges."""
    expected = expected_edge_frequencies(skel)
    worst = 0.0
    for (side, idx), mu_frac in expected.items():
        angle = skel.orbit.angles[idx]
        emp = 0.0
        for (s, ci), f in report.frequencies.items():
            if s == side and angle_distance(report.class_angles[ci], angle) <= match_tol:
                emp += f
        worst = max(worst, abs(emp - mu_frac))
    return worst
