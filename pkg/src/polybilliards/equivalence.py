"""Cross-polygon comparisons: code/order agreement, the direction-transfer
function, corner pointing counts, and shape verdicts.

Two polygons with equal side counts are compared through a *leader pair*:
one start in each, with sides matched by index (counterclockwise numbering
``e_i ~ f_i``).  Codes agreeing over a long window, combinatorial order of
the boundary projections, constancy of the direction-transfer function and
matching corner pointing counts are the empirical faces of the rigidity
results this package is built to exercise: such agreement forces equal
angles, similarity (for triangles), or affine similarity.

None of these checks can *prove* equivalence — they run to a finite
horizon — so every operation reports witnesses rather than bare booleans
wherever a failure can be localized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .coding import same_combinatorial_order
from .diagonals import is_exceptional
from .dynamics import Orbit, PhasePoint, iterate, plane_direction
from .geometry import AngleClass, Polygon, classify_rationality
from .planar import angle_distance, segment_point_distance


class InconclusiveEstimate(RuntimeError):
    """An empirical count did not stabilize across refinement levels."""


@dataclass
class LeaderPair:
    """Candidate leaders: polygons with matched side counts plus one start each."""

    P: Polygon
    Q: Polygon
    u: PhasePoint
    v: PhasePoint
    horizon: int = 0

    def __post_init__(self) -> None:
        if len(self.P) != len(self.Q):
            raise ValueError(
                f"side counts differ: {len(self.P)} vs {len(self.Q)}")


def codes_agree(lp: LeaderPair, n: int) -> Optional[int]:
    """None when the leaders' codes agree for ``n`` symbols, else the first
    disagreement index.  Orbits that terminate early count as disagreement
    at the first missing symbol unless both terminate identically."""
    o1 = iterate(lp.P, lp.u, n - 1)
    o2 = iterate(lp.Q, lp.v, n - 1)
    return _first_code_mismatch(o1, o2, n)


def _first_code_mismatch(o1: Orbit, o2: Orbit, n: int) -> Optional[int]:
    c1, c2 = o1.code_symbols(), o2.code_symbols()
    common = min(len(c1), len(c2), n)
    for i in range(common):
        if c1[i] != c2[i]:
            return i
    if len(c1) < n or len(c2) < n:
        if len(c1) != len(c2):
            return common
    return None


def boundary_density(p: Polygon, u: PhasePoint, n: int) -> float:
    """Largest gap between visited boundary points, as a perimeter fraction.

    Small values certify empirical density of the orbit's boundary
    projection; periodic orbits plateau at a positive value forever.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    o = iterate(p, u, n)
    coords = sorted(p.arc_coordinate(pt.boundary_point()) / p.perimeter
                    for pt in o.points)
    worst = coords[0] + 1.0 - coords[-1]
    for a, b in zip(coords, coords[1:]):
        worst = max(worst, b - a)
    return worst


def index_set(p: Polygon, u: PhasePoint, side: int, theta: float, n: int,
              tol: float = 1e-9, orbit: Optional[Orbit] = None) -> list[int]:
    """Orbit times landing on ``side`` with outgoing direction ``theta``.

    ``theta`` is the phase angle measured from the side's inward normal;
    matching uses the direction-cluster tolerance, consistent with the
    finitely many direction values of rational polygons.
    """
    o = orbit if orbit is not None else iterate(p, u, n)
    return [i for i, pt in enumerate(o.points[:n + 1])
            if pt.side == side and abs(pt.theta - theta) <= tol]


@dataclass
class GReport:
    """Sampled direction-transfer data over one index set.

    For every time the first orbit revisits (side, direction), the second
    orbit's position and direction are recorded.  When the codes agree and
    the systems are genuinely conjugate the direction must be constant per
    positional cluster; ``beta_spread`` is the global spread (max - min)
    of the recorded directions and ``components`` groups the samples by
    direction value.
    """

    side: int
    theta: float
    pairs: list[tuple[float, float]]       # (position on f_side, direction)
    beta_spread: float
    components: list[tuple[float, tuple[float, float]]]  # (beta, y-range)


def g_function(lp: LeaderPair, side: int, theta: float, n: int,
               tol: float = 1e-9) -> GReport:
    """Direction-transfer samples for the leader pair over ``I(u, side, theta)``."""
    o1 = iterate(lp.P, lp.u, n)
    o2 = iterate(lp.Q, lp.v, n)
    mism = _first_code_mismatch(o1, o2, min(len(o1), len(o2)))
    if mism is not None:
        raise ValueError(f"leader codes disagree at index {mism}")
    idx = index_set(lp.P, lp.u, side, theta, n, tol=tol, orbit=o1)
    if not idx:
        raise ValueError(f"empty index set for side {side}, theta {theta}")
    pairs = []
    for m in idx:
        vm = o2.points[m]
        if vm.side != side:
            raise AssertionError("agreeing codes landed on different sides")
        pairs.append((vm.position, vm.theta))
    betas = sorted(b for _, b in pairs)
    spread = betas[-1] - betas[0]
    components: list[tuple[float, tuple[float, float]]] = []
    for y, b in sorted(pairs):
        for j, (rep, (ylo, yhi)) in enumerate(components):
            if abs(b - rep) <= tol:
                components[j] = (rep, (min(ylo, y), max(yhi, y)))
                break
        else:
            components.append((b, (y, y)))
    return GReport(side, theta, pairs, spread, components)


def pointing_count(p: Polygon, u: PhasePoint, corner: int, n: int,
                   delta: float = 0.05, transient: float = 0.1,
                   guard_depth: int = 4, direction_tol: float = 1e-9) -> int:
    """Number of limit (side, direction) families whose next flight reaches
    the corner.

    Counts clusters of orbit points whose outgoing segment passes within
    ``delta`` of the corner, grouped by (side, direction class), keeping
    only clusters that persist at ``delta/2`` and ``delta/4``.  Raises
    :class:`InconclusiveEstimate` when the three counts disagree and
    ``ValueError`` for starts in obviously exceptional directions.
    """
    if not 1 <= corner <= len(p):
        raise ValueError(f"corner {corner} out of range")
    verdict = is_exceptional(p, plane_direction(p, u), guard_depth)
    if verdict.exceptional:
        raise ValueError(
            f"start direction is exceptional at depth {guard_depth} "
            f"(diagonal {verdict.witness.start_corner}->{verdict.witness.end_corner})")
    o = iterate(p, u, n)
    if o.terminated is not None:
        raise ValueError("orbit terminated before the horizon")
    from .dynamics import floor_directions
    reps = floor_directions(o, direction_tol)

    def direction_class(a: float) -> int:
        for j, rep in enumerate(reps):
            if angle_distance(a, rep) <= direction_tol:
                return j
        raise AssertionError("direction missing from its own clustering")

    cx, cy = p.corner(corner)
    pts = o.bounce_plane_points()
    start = int(len(pts) * transient)
    counts = []
    for d in (delta, delta / 2.0, delta / 4.0):
        clusters: set[tuple[int, int]] = set()
        for i in range(start, len(pts) - 1):
            ax, ay = pts[i]
            bx, by = pts[i + 1]
            if segment_point_distance(cx, cy, ax, ay, bx, by) <= d:
                clusters.add((o.points[i].side, direction_class(o.directions[i])))
        counts.append(len(clusters))
    if len(set(counts)) != 1:
        raise InconclusiveEstimate(
            f"cluster counts {counts} at deltas {delta}, {delta/2}, {delta/4}")
    return counts[0]


def order_agree(lp: LeaderPair, n: int, tol: float = 1e-12) -> bool:
    """Same combinatorial order of the two boundary projection sequences."""
    o1 = iterate(lp.P, lp.u, n)
    o2 = iterate(lp.Q, lp.v, n)
    m = min(len(o1), len(o2))
    xs = [lp.P.arc_coordinate(pt.boundary_point()) / lp.P.perimeter
          for pt in o1.points[:m]]
    ys = [lp.Q.arc_coordinate(pt.boundary_point()) / lp.Q.perimeter
          for pt in o2.points[:m]]
    return same_combinatorial_order(xs, ys, tol=tol)


def directions_rank_match(lp: LeaderPair, n: int,
                          tol: float = 1e-9) -> dict[int, list[tuple[float, float]]]:
    """Per side, the sorted direction values of both orbits paired by rank.

    The order-isomorphism of directions between code-equivalent billiards
    justifies rank pairing; unequal counts per side make the pairing (and
    any equivalence) impossible and raise ``ValueError``.
    """
    o1 = iterate(lp.P, lp.u, n)
    o2 = iterate(lp.Q, lp.v, n)
    out: dict[int, list[tuple[float, float]]] = {}
    for side in range(1, len(lp.P) + 1):
        t1 = _clustered([pt.theta for pt in o1.points if pt.side == side], tol)
        t2 = _clustered([pt.theta for pt in o2.points if pt.side == side], tol)
        if len(t1) != len(t2):
            raise ValueError(
                f"side {side}: {len(t1)} vs {len(t2)} direction values")
        out[side] = list(zip(t1, t2))
    return out


def _clustered(values: Sequence[float], tol: float) -> list[float]:
    reps: list[float] = []
    for v in sorted(values):
        if not reps or v - reps[-1] > tol:
            reps.append(v)
    return reps


# -- shape verdicts ----------------------------------------------------------------


@dataclass(frozen=True)
class SimilarityVerdict:
    """Strongest shape relation between two polygons under the best cyclic
    relabeling of the second one.

    ``kind`` is one of ``"similar"``, ``"affinely_similar"``,
    ``"same_angles"``, ``"distinct"``.  ``rotation`` is the relabeling
    offset (side ``i`` of P corresponds to side ``i + rotation`` of Q).
    ``scale`` holds the ratio |f_i|/|e_i| for similar pairs;
    ``scale_horizontal``/``scale_vertical`` the two ratios of the
    axis-aligned case.  ``witness`` localizes the failure for distinct
    pairs as ``(corner, angle_P, angle_Q)``.
    """

    kind: str
    rotation: Optional[int]
    scale: Optional[float] = None
    scale_horizontal: Optional[float] = None
    scale_vertical: Optional[float] = None
    witness: Optional[tuple[int, float, float]] = None


_KIND_RANK = {"distinct": 0, "same_angles": 1, "affinely_similar": 2,
              "similar": 3}


def similarity_verdict(P: Polygon, Q: Polygon,
                       angle_tol: float = 1e-9,
                       ratio_tol: float = 1e-9) -> SimilarityVerdict:
    """Classify the pair as similar / affinely similar / angle-equal / distinct.

    All cyclic rotations of Q's side labels are tried and the strongest
    verdict wins.  Reflections are never applied: both polygons are
    counterclockwise by construction.  The axis-aligned two-ratio relation
    only exists for polygons whose angle denominators have lcm 2 (all
    sides parallel to two perpendicular directions).
    """
    if len(P) != len(Q):
        raise ValueError(f"side counts differ: {len(P)} vs {len(Q)}")
    k = len(P)
    best = SimilarityVerdict("distinct", None,
                             witness=(1, P.interior_angle(1), Q.interior_angle(1)))
    for r in range(k):
        verdict = _verdict_for_rotation(P, Q, r, angle_tol, ratio_tol)
        if _KIND_RANK[verdict.kind] > _KIND_RANK[best.kind]:
            best = verdict
    return best


def _verdict_for_rotation(P: Polygon, Q: Polygon, r: int,
                          angle_tol: float, ratio_tol: float) -> SimilarityVerdict:
    k = len(P)
    for i in range(1, k + 1):
        a, b = P.interior_angle(i), Q.interior_angle(Q.wrap(i + r))
        sa, sb = P.angle_spec(i), Q.angle_spec(Q.wrap(i + r))
        if sa is not None and sb is not None:
            if sa != sb:
                return SimilarityVerdict("distinct", r, witness=(i, a, b))
        elif abs(a - b) > angle_tol:
            return SimilarityVerdict("distinct", r, witness=(i, a, b))

    ratios = [Q.side_length(Q.wrap(i + r)) / P.side_length(i)
              for i in range(1, k + 1)]
    mean = sum(ratios) / k
    if all(abs(x - mean) <= ratio_tol * max(1.0, mean) for x in ratios):
        return SimilarityVerdict("similar", r, scale=mean)

    if _lcm_of(P) == 2 and _lcm_of(Q) == 2:
        # sides split into two perpendicular classes relative to side 1
        h_ratio: list[float] = []
        v_ratio: list[float] = []
        for i in range(1, k + 1):
            (h_ratio if _is_horizontal(P, i) else v_ratio).append(ratios[i - 1])
        if h_ratio and v_ratio:
            a = sum(h_ratio) / len(h_ratio)
            b = sum(v_ratio) / len(v_ratio)
            if all(abs(x - a) <= ratio_tol * max(1.0, a) for x in h_ratio) and \
               all(abs(x - b) <= ratio_tol * max(1.0, b) for x in v_ratio):
                return SimilarityVerdict("affinely_similar", r,
                                         scale_horizontal=a, scale_vertical=b)

    return SimilarityVerdict("same_angles", r)


def _lcm_of(p: Polygon) -> Optional[int]:
    ac = classify_rationality(p, max_denominator=64)
    return ac.lcm if ac.is_rational else None


def _is_horizontal(p: Polygon, side: int) -> bool:
    """Side parallel to side 1 (as opposed to perpendicular)."""
    d = abs(math.fmod(p.side_angle(side) - p.side_angle(1), math.pi))
    d = min(d, math.pi - d)
    return d < math.pi / 4.0


# -- explicit affine conjugacies -----------------------------------------------------


def affine_image_phase(P: Polygon, Q: Polygon, u: PhasePoint,
                       sx: float, sy: float) -> PhasePoint:
    """Phase point of Q matching ``u`` under the map (x, y) -> (sx*x, sy*y).

    Valid whenever Q is the image of P under that axis-aligned scaling
    (e.g. rectangles); the map conjugates the two billiards, sending sides
    to sides and straight segments to straight segments.
    """
    from .dynamics import direction_vector, phase_from_direction
    x, y = P.boundary_to_plane(u.boundary_point())
    b = Q.plane_to_boundary((sx * x, sy * y))
    vx, vy = direction_vector(P, u)
    wx, wy = sx * vx, sy * vy
    norm = math.hypot(wx, wy)
    return phase_from_direction(Q, b.side, b.position, wx / norm, wy / norm)
