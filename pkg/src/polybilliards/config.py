"""Centralized numerical tolerances.

Every module reads its knobs from one :class:`Tolerances` record so the
whole pipeline can be audited (or tightened) in one place.  Values are
absolute and assume polygons of roughly unit scale.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    #: snapping distance for coordinates (duplicate vertices, corner hits,
    #: boundary membership)
    coord_snap: float = 1e-9
    #: tolerance for angle comparisons (rationality checks, declared angle
    #: specs vs. coordinates, diagonal-direction parallelism)
    angle_tol: float = 1e-10
    #: clustering width when grouping trajectory directions into classes
    direction_cluster: float = 1e-9
    #: two boundary points closer than this (as a fraction of the perimeter)
    #: are considered duplicates by the circular-order comparator
    duplicate_point: float = 1e-12


DEFAULT = Tolerances()
