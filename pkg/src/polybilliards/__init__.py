"""Polygonal billiard dynamics: codes, unfolding, surfaces, equivalences."""

__version__ = "0.1.0"

from .config import DEFAULT, Tolerances
from .geometry import (AngleClass, BoundaryPoint, Polygon, PolygonError,
                       PolygonFormatError, classify_rationality,
                       dumps_polygon, load_polygon, loads_polygon,
                       lshape, polygon_from_angles, rectangle,
                       regular_polygon, save_polygon, staircase_polygon,
                       triangle_from_fractions, unit_square, validate_polygon)
from .dynamics import (CornerHit, Orbit, PhasePoint, Tangency, floor_count,
                       floor_directions, iterate, plane_direction, rho, step,
                       time_reversed)
from .unfolding import UnfoldedPath, unfold, unfolded_orbit
from .coding import (Code, DegenerateCellError, EpsilonReport, GapStats,
                     HalfPlane, IntersectionReport, PrefixCell, code_of,
                     epsilon, epsilon_profile, intersect_before_separation,
                     prefix_cell, recurrence_gaps, same_combinatorial_order,
                     same_combinatorial_order_naive, separation_index)
from .surface import (BirkhoffReport, ConePoint, DirectionOrbit, Skeleton,
                      SkeletonEdge, Surface, SurfaceCopy,
                      birkhoff_side_distribution, build_surface,
                      compare_to_skeleton, direction_orbit,
                      expected_edge_frequencies, skeleton, star_discrepancy)
from .diagonals import (ExceptionalVerdict, GeneralizedDiagonal,
                        enumerate_diagonals, is_exceptional, retrace_code)
from .equivalence import (GReport, InconclusiveEstimate, LeaderPair,
                          SimilarityVerdict, affine_image_phase,
                          boundary_density, codes_agree, directions_rank_match,
                          g_function, index_set, order_agree, pointing_count,
                          similarity_verdict)
