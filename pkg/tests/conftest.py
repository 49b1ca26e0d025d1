import math
import random
from fractions import Fraction

import pytest

from polybilliards import (Polygon, PolygonError, rectangle,
                           triangle_from_fractions, unit_square)


@pytest.fixture
def square() -> Polygon:
    return unit_square()


@pytest.fixture
def rect23() -> Polygon:
    return rectangle(2.0, 3.0)


@pytest.fixture
def tri_236() -> Polygon:
    return triangle_from_fractions((1, 2), (1, 3), (1, 6))


@pytest.fixture
def equilateral() -> Polygon:
    return triangle_from_fractions((1, 3), (1, 3), (1, 3))


@pytest.fixture
def tri_8() -> Polygon:
    return triangle_from_fractions((1, 2), (1, 8), (3, 8))


GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
GOLDEN_THETA = math.atan(1.0 / GOLDEN)


def random_convex_polygon(rng: random.Random, k: int) -> Polygon:
    """Convex k-gon: k sorted directions on a unit-ish circle."""
    while True:
        angles = sorted(rng.uniform(0.0, 2.0 * math.pi) for _ in range(k))
        if min(b - a for a, b in zip(angles, angles[1:])) < 0.15:
            continue
        if angles[0] + 2.0 * math.pi - angles[-1] < 0.15:
            continue
        r = rng.uniform(0.7, 1.3)
        verts = [(r * math.cos(a), r * math.sin(a)) for a in angles]
        try:
            return Polygon(verts)
        except PolygonError:
            continue


def random_star_polygon(rng: random.Random, k: int) -> Polygon:
    """Simple, generally non-convex k-gon with radially sorted vertices."""
    while True:
        angles = sorted(rng.uniform(0.0, 2.0 * math.pi) for _ in range(k))
        if min(b - a for a, b in zip(angles, angles[1:])) < 0.12:
            continue
        if angles[0] + 2.0 * math.pi - angles[-1] < 0.12:
            continue
        verts = [(rng.uniform(0.45, 1.35) * math.cos(a),
                  rng.uniform(0.45, 1.35) * math.sin(a)) for a in angles]
        try:
            return Polygon(verts)
        except PolygonError:
            continue


def random_rational_triangle(rng: random.Random,
                             max_den: int = 9) -> Polygon:
    """Triangle with random exact angle fractions of pi."""
    while True:
        n1 = rng.randint(2, max_den)
        n2 = rng.randint(2, max_den)
        f1 = Fraction(rng.randint(1, n1 - 1), n1)
        f2 = Fraction(rng.randint(1, n2 - 1), n2)
        f3 = 1 - f1 - f2
        if not 0 < f3 < 1:
            continue
        try:
            return triangle_from_fractions((f1.numerator, f1.denominator),
                                           (f2.numerator, f2.denominator),
                                           (f3.numerator, f3.denominator))
        except PolygonError:
            continue


def random_phase_start(rng: random.Random, p: Polygon):
    from polybilliards import PhasePoint
    side = rng.randint(1, len(p))
    pos = rng.uniform(0.15, 0.85) * p.side_length(side)
    theta = rng.uniform(-1.25, 1.25)
    return PhasePoint(side, pos, theta)
