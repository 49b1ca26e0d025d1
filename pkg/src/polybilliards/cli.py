"""Command-line front end.

Every subcommand reads polygons from the line-oriented text format, writes
CSV or plain-text reports (to ``--out`` or stdout) and is deterministic:
identical inputs and seed produce byte-identical outputs.  Output files
start with comment headers recording the tool version and the scenario.

Angles are radians unless prefixed ``deg:``; positions are arc length
unless prefixed ``frac:`` (fraction of the side).  Exit codes: 0 success,
1 domain error (invalid polygon, violated precondition), 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from typing import Optional, Sequence

from . import __version__
from .coding import code_of, epsilon_profile, prefix_cell
from .diagonals import enumerate_diagonals, is_exceptional
from .dynamics import CornerHit, PhasePoint, Tangency, iterate, orbit_csv_lines
from .equivalence import LeaderPair, codes_agree, order_agree, similarity_verdict
from .geometry import Polygon, PolygonError, PolygonFormatError, classify_rationality, load_polygon
from .surface import (birkhoff_side_distribution, build_surface, direction_orbit,
                      skeleton)


def _parse_angle(text: str) -> float:
    if text.startswith("deg:"):
        return math.radians(float(text[4:]))
    return float(text)


def _parse_position(text: str, p: Polygon, side: int) -> float:
    if text.startswith("frac:"):
        return float(text[5:]) * p.side_length(side)
    return float(text)


def _write_out(path: Optional[str], lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".polybilliards-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _header(args: argparse.Namespace, name: str) -> list[str]:
    seed = getattr(args, "seed", None)
    items = [f"polybilliards {__version__}", f"scenario: {name}"]
    if seed is not None:
        items.append(f"seed: {seed}")
    return items


def _start_phase(args: argparse.Namespace, p: Polygon) -> PhasePoint:
    pos = _parse_position(args.pos, p, args.side)
    return PhasePoint(args.side, pos, _parse_angle(args.theta))


def _add_start_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--side", type=int, required=True, help="1-based side index")
    sub.add_argument("--pos", required=True,
                     help="arc-length position, or frac:<t> for a side fraction")
    sub.add_argument("--theta", required=True,
                     help="direction from the inward normal (radians, or deg:<d>)")


def _add_common(sub: argparse.ArgumentParser, start: bool = False) -> None:
    sub.add_argument("--polygon", required=True, help="polygon file")
    sub.add_argument("--out", default=None, help="output path (default stdout)")
    sub.add_argument("--seed", type=int, default=None, help="recorded in the header")
    if start:
        _add_start_options(sub)


def _cmd_validate(args) -> int:
    p = load_polygon(args.polygon)
    lines = [f"# {h}" for h in _header(args, "validate")]
    lines.append(f"valid polygon {p.name!r}: {len(p)} sides")
    for i in range(1, len(p) + 1):
        spec = p.angle_spec(i)
        extra = f" = pi*{spec[0]}/{spec[1]}" if spec else ""
        lines.append(f"corner {i}: angle {p.interior_angle(i):.17g}{extra}")
    _write_out(args.out, lines)
    return 0


def _cmd_classify(args) -> int:
    p = load_polygon(args.polygon)
    ac = classify_rationality(p, max_denominator=args.max_denominator,
                              tol=args.tol)
    lines = [f"# {h}" for h in _header(args, "classify")]
    lines.append(f"kind: {ac.kind}")
    if ac.is_rational:
        fr = " ".join(f"{m}/{n}" for m, n in ac.fractions)
        lines.append(f"fractions: {fr}")
        lines.append(f"lcm: {ac.lcm}")
    _write_out(args.out, lines)
    return 0


def _cmd_orbit(args) -> int:
    p = load_polygon(args.polygon)
    u = _start_phase(args, p)
    o = iterate(p, u, args.steps)
    _write_out(args.out, orbit_csv_lines(o, _header(args, "orbit")))
    return 0


def _cmd_code(args) -> int:
    p = load_polygon(args.polygon)
    u = _start_phase(args, p)
    c = code_of(p, u, args.symbols)
    lines = [f"# {h}" for h in _header(args, "code")]
    if not c.complete:
        lines.append(f"# incomplete: {len(c)} of {args.symbols} symbols")
    lines.append(" ".join(str(s) for s in c.symbols))
    _write_out(args.out, lines)
    return 0


def _cmd_epsilon(args) -> int:
    p = load_polygon(args.polygon)
    u = _start_phase(args, p)
    depths = [int(x) for x in args.depths.split(",") if x]
    reports = epsilon_profile(p, u, depths)
    lines = [f"# {h}" for h in _header(args, "epsilon")]
    lines.append("m,eps1,eps2,eps")
    for r in reports:
        lines.append(f"{r.m},{r.eps1:.17g},{r.eps2:.17g},{r.eps:.17g}")
    _write_out(args.out, lines)
    if args.cell_out:
        cell = prefix_cell(p, u, max(depths))
        cl = [f"# {h}" for h in _header(args, "epsilon cell")]
        cl.append("a,b,c")
        for h in cell.halfplanes:
            cl.append(f"{h.a:.17g},{h.b:.17g},{h.c:.17g}")
        _write_out(args.cell_out, cl)
    return 0


def _cmd_diagonals(args) -> int:
    p = load_polygon(args.polygon)
    ds = enumerate_diagonals(p, args.max_segments)
    lines = [f"# {h}" for h in _header(args, "diagonals")]
    lines.append("startCorner,endCorner,segments,direction,length,codeWord")
    for d in ds:
        word = "-".join(str(s) for s in d.code_word)
        lines.append(f"{d.start_corner},{d.end_corner},{d.segments},"
                     f"{d.direction:.17g},{d.length:.17g},{word}")
    _write_out(args.out, lines)
    return 0


def _cmd_surface(args) -> int:
    p = load_polygon(args.polygon)
    s = build_surface(p)
    lines = [f"# {h}" for h in _header(args, "surface")]
    lines.append(f"copies: {s.copy_count}")
    lines.append(f"euler characteristic: {s.euler_characteristic}")
    lines.append(f"genus: {s.genus}")
    for cp in s.cone_points:
        lines.append(f"cone point over corner {cp.corner}: "
                     f"{cp.copies_meeting} copies, total angle {cp.total_angle:.17g}")
    lines.append("gluing table (copy,side)->(copy,side):")
    for (i, e), (j, f) in sorted(s.gluings.items()):
        lines.append(f"  ({i},{e}) -> ({j},{f})")
    _write_out(args.out, lines)
    return 0


def _cmd_skeleton(args) -> int:
    p = load_polygon(args.polygon)
    d = direction_orbit(p, _parse_angle(args.theta))
    sk = skeleton(p, d)
    lines = [f"# {h}" for h in _header(args, "skeleton")]
    lines.append(f"# total mu: {sk.total_mu:.17g}")
    lines.append("side,copy,partnerCopy,angleIndex,crossingAngle,muLength,tangent")
    for e in sk.edges:
        lines.append(f"{e.side},{e.copy},{e.partner_copy},{e.angle_index},"
                     f"{e.crossing_angle:.17g},{e.mu_length:.17g},{int(e.tangent)}")
    _write_out(args.out, lines)
    return 0


def _cmd_birkhoff(args) -> int:
    p = load_polygon(args.polygon)
    u = _start_phase(args, p)
    rep = birkhoff_side_distribution(p, u, args.steps, bins=args.bins)
    lines = [f"# {h}" for h in _header(args, "birkhoff")]
    lines.append(f"# steps: {rep.steps} complete: {rep.complete}")
    lines.append("side,classIndex,classAngle,count,frequency")
    for (side, ci), cnt in sorted(rep.counts.items()):
        lines.append(f"{side},{ci},{rep.class_angles[ci]:.17g},{cnt},"
                     f"{rep.frequencies[(side, ci)]:.17g}")
    lines.append("side,discrepancy")
    for side, disc in sorted(rep.side_discrepancy.items()):
        lines.append(f"{side},{disc:.17g}")
    _write_out(args.out, lines)
    return 0


def _second_start(args, p: Polygon, q: Polygon) -> PhasePoint:
    side = args.side2 if args.side2 is not None else args.side
    pos_text = args.pos2 if args.pos2 is not None else args.pos
    theta_text = args.theta2 if args.theta2 is not None else args.theta
    return PhasePoint(side, _parse_position(pos_text, q, side),
                      _parse_angle(theta_text))


def _cmd_equiv(args) -> int:
    p = load_polygon(args.polygon)
    q = load_polygon(args.polygon2)
    u = _start_phase(args, p)
    v = _second_start(args, p, q)
    lp = LeaderPair(p, q, u, v, args.horizon)
    sep = codes_agree(lp, args.horizon)
    verdict = similarity_verdict(p, q)
    lines = [f"# {h}" for h in _header(args, "equiv")]
    lines.append(f"codes: {'agree' if sep is None else f'separate at {sep}'} "
                 f"over {args.horizon} symbols")
    lines.append(f"shape: {verdict.kind} (rotation {verdict.rotation})")
    if verdict.scale is not None:
        lines.append(f"scale: {verdict.scale:.17g}")
    if verdict.scale_horizontal is not None:
        lines.append(f"scales: {verdict.scale_horizontal:.17g} "
                     f"{verdict.scale_vertical:.17g}")
    _write_out(args.out, lines)
    return 0


def _cmd_order(args) -> int:
    p = load_polygon(args.polygon)
    q = load_polygon(args.polygon2)
    u = _start_phase(args, p)
    v = _second_start(args, p, q)
    lp = LeaderPair(p, q, u, v, args.points)
    agree = order_agree(lp, args.points)
    lines = [f"# {h}" for h in _header(args, "order")]
    lines.append(f"order_agree: {agree}")
    _write_out(args.out, lines)
    return 0


def _cmd_plot(args) -> int:
    p = load_polygon(args.polygon)
    u = _start_phase(args, p)
    o = iterate(p, u, args.steps)
    pts = o.bounce_plane_points()
    xs = [v[0] for v in p.vertices]
    ys = [v[1] for v in p.vertices]
    pad = 0.05 * max(max(xs) - min(xs), max(ys) - min(ys))
    x0, y0 = min(xs) - pad, min(ys) - pad
    w, h = max(xs) - min(xs) + 2 * pad, max(ys) - min(ys) + 2 * pad

    def sx(x: float) -> float:
        return (x - x0) / w * 800.0

    def sy(y: float) -> float:
        return 800.0 - (y - y0) / h * 800.0  # svg y grows downward

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" '
             f'viewBox="0 0 800 800">',
             f"<!-- polybilliards {__version__}; scenario: plot -->"]
    outline = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in p.vertices)
    lines.append(f'<polygon points="{outline}" fill="none" stroke="black" '
                 f'stroke-width="2"/>')
    for a, b in zip(pts, pts[1:]):
        lines.append(f'<line x1="{sx(a[0]):.3f}" y1="{sy(a[1]):.3f}" '
                     f'x2="{sx(b[0]):.3f}" y2="{sy(b[1]):.3f}" '
                     f'stroke="steelblue" stroke-width="1"/>')
    lines.append("</svg>")
    out = args.out or "orbit.svg"
    _write_out(out, lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polybilliards",
        description="polygonal billiard dynamics, codes and surfaces")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("validate", help="validate a polygon file")
    _add_common(s)
    s.set_defaults(func=_cmd_validate)

    s = subs.add_parser("classify", help="rationality classification")
    _add_common(s)
    s.add_argument("--max-denominator", type=int, default=100)
    s.add_argument("--tol", type=float, default=None)
    s.set_defaults(func=_cmd_classify)

    s = subs.add_parser("orbit", help="iterate the billiard map, write CSV")
    _add_common(s, start=True)
    s.add_argument("--steps", type=int, required=True)
    s.set_defaults(func=_cmd_orbit)

    s = subs.add_parser("code", help="symbolic itinerary")
    _add_common(s, start=True)
    s.add_argument("--symbols", type=int, required=True)
    s.set_defaults(func=_cmd_code)

    s = subs.add_parser("epsilon", help="prefix-cell deviation bounds")
    _add_common(s, start=True)
    s.add_argument("--depths", default="10,100,1000",
                   help="comma-separated prefix lengths")
    s.add_argument("--cell-out", default=None,
                   help="also dump the deepest cell's half-planes as CSV")
    s.set_defaults(func=_cmd_epsilon)

    s = subs.add_parser("diagonals", help="enumerate generalized diagonals")
    _add_common(s)
    s.add_argument("--max-segments", type=int, required=True)
    s.set_defaults(func=_cmd_diagonals)

    s = subs.add_parser("surface", help="build the invariant flat surface")
    _add_common(s)
    s.set_defaults(func=_cmd_surface)

    s = subs.add_parser("skeleton", help="skeleton edges with measure")
    _add_common(s)
    s.add_argument("--theta", required=True, help="base plane direction")
    s.set_defaults(func=_cmd_skeleton)

    s = subs.add_parser("birkhoff", help="empirical hit distribution")
    _add_common(s, start=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--bins", type=int, default=64)
    s.set_defaults(func=_cmd_birkhoff)

    s = subs.add_parser("equiv", help="code agreement and shape verdict")
    _add_common(s, start=True)
    s.add_argument("--polygon2", required=True)
    s.add_argument("--horizon", type=int, default=1000)
    s.add_argument("--side2", type=int, default=None)
    s.add_argument("--pos2", default=None)
    s.add_argument("--theta2", default=None)
    s.set_defaults(func=_cmd_equiv)

    s = subs.add_parser("order", help="combinatorial order agreement")
    _add_common(s, start=True)
    s.add_argument("--polygon2", required=True)
    s.add_argument("--points", type=int, default=1000)
    s.add_argument("--side2", type=int, default=None)
    s.add_argument("--pos2", default=None)
    s.add_argument("--theta2", default=None)
    s.set_defaults(func=_cmd_order)

    s = subs.add_parser("plot", help="SVG of the boundary plus trajectory")
    _add_common(s, start=True)
    s.add_argument("--steps", type=int, required=True)
    s.set_defaults(func=_cmd_plot)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (PolygonError, PolygonFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
