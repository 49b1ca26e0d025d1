"""Independent test oracles: brute-force or closed-form routes that share no
code with the implementations they check."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional


def best_rational_angle_brute(angle: float, max_den: int) -> tuple[int, int, float]:
    """Best m/n with n <= max_den for angle ~ pi*m/n, by exhaustive search."""
    best = None
    for n in range(1, max_den + 1):
        m = round(angle * n / math.pi)
        if m < 1:
            continue
        err = abs(angle - math.pi * m / n)
        if best is None or err < best[2]:
            g = math.gcd(m, n)
            best = (m // g, n // g, err)
    return best


def genus_from_fractions(fractions) -> int:
    """Independent genus formula: 1 + (N/2) * sum (m_i - 1)/n_i, exact."""
    N = 1
    for _, n in fractions:
        N = N * n // math.gcd(N, n)
    total = sum(Fraction(m - 1, n) for m, n in fractions)
    g = 1 + Fraction(N, 2) * total
    assert g.denominator == 1, "genus formula did not give an integer"
    return int(g)


def square_lattice_diagonals(max_segments: int):
    """Generalized diagonals of the unit square from the reflection lattice.

    Unfolding the unit square tiles the plane by integer translates of
    reflected copies; corner images are exactly the integer lattice points.
    A diagonal leaving corner 1 = (0,0) into the interior corresponds to a
    visible lattice point (p, q), p, q >= 1, gcd(p, q) = 1, crossing
    p + q - 2 grid lines, i.e. p + q - 1 segments.  Crossing the vertical
    line x = i means bouncing off side 2 (x = 1) when i is odd and side 4
    (x = 0) when even; horizontal lines y = j give side 3 (odd) / side 1
    (even).  The end corner is read off the parities of (p, q).  Other
    start corners follow by the square's symmetries (coordinate flips).

    Returns a set of tuples (start, end, code_word, direction, length).
    """
    out = set()
    # corner -> (flip_x, flip_y): map the square onto itself sending the
    # corner to the origin; corners are 1=(0,0), 2=(1,0), 3=(1,1), 4=(0,1)
    corner_flips = {1: (False, False), 2: (True, False),
                    3: (True, True), 4: (False, True)}
    corner_of_parity = {(0, 0): 1, (1, 0): 2, (1, 1): 3, (0, 1): 4}

    def map_side(side: int, flip_x: bool, flip_y: bool) -> int:
        if flip_x and side in (2, 4):
            return 6 - side
        if flip_y and side in (1, 3):
            return 4 - side
        return side

    def map_corner(px: int, py: int, flip_x: bool, flip_y: bool) -> int:
        # parity of the folded endpoint, then undo the coordinate flips
        ex, ey = px % 2, py % 2
        if flip_x:
            ex = 1 - ex
        if flip_y:
            ey = 1 - ey
        return corner_of_parity[(ex, ey)]

    for start, (fx, fy) in corner_flips.items():
        sx, sy = corner_flips[start]
        x0 = 1.0 if sx else 0.0
        y0 = 1.0 if sy else 0.0
        for p in range(1, max_segments + 1):
            for q in range(1, max_segments + 1):
                if p + q - 1 > max_segments or math.gcd(p, q) != 1:
                    continue
                crossings = []
                for i in range(1, p):
                    crossings.append((i / p, map_side(2 if i % 2 else 4, fx, fy)))
                for j in range(1, q):
                    crossings.append((j / q, map_side(3 if j % 2 else 1, fx, fy)))
                crossings.sort()
                word = tuple(side for _, side in crossings)
                end = map_corner(p, q, fx, fy)
                dx = -p if fx else p
                dy = -q if fy else q
                direction = math.atan2(dy, dx)
                length = math.hypot(p, q)
                out.add((start, end, word, round(direction, 9), round(length, 9)))
    return out


def triple_loop_order(xs, ys) -> bool:
    """Pure-Python all-triples combinatorial order check (small n only)."""
    n = len(xs)
    xs = [x % 1.0 for x in xs]
    ys = [y % 1.0 for y in ys]

    def member(seq, k, l, m) -> bool:
        return (seq[k] - seq[l]) % 1.0 <= (seq[m] - seq[l]) % 1.0

    for k in range(n):
        for l in range(n):
            for m in range(n):
                if member(xs, k, l, m) != member(ys, k, l, m):
                    return False
    return True
