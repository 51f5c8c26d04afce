"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 domain error.
Points are given as HPoint JSON (``{"n":1,"x":[0],"y":[0],"t":1}``), as a
flat list ``x1,..,xn,y1,..,yn,t`` (parentheses optional) or as ``origin``.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys

import numpy as np

from . import __version__
from .convexity import builtin_field, scan_for_witness
from .core import TWO_PI, HPoint
from .geodesics import arc_length, cc_distance, connect, sample_arc
from .hull import DEFAULT_DEPTH, bubble_sample, bubble_symmetry_check, growth_certificate, hull_points
from .serialize import (
    arc_to_json,
    bubble_header,
    dumps,
    fmt,
    growth_to_csv,
    point_from_json,
    polyline_to_csv,
    polyline_to_json,
    report_to_json,
)

EXIT_USAGE = 1
EXIT_DOMAIN = 2


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_point(text: str, n: int | None = None) -> HPoint | None:
    """Parse a CLI point; ``origin`` returns ``None`` unless ``n`` is known."""
    raw = text.strip()
    if raw.lower() == "origin":
        return HPoint.origin(n) if n is not None else None
    try:
        if raw.startswith("{"):
            p = point_from_json(json.loads(raw))
        else:
            values = [float(v) for v in raw.strip("()[] ").split(",")]
            p = HPoint.from_array(values)
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot parse point {text!r}: {exc}") from exc
    if n is not None and p.n != n:
        raise UsageError(f"point {text!r} lives in H^{p.n}, expected H^{n}")
    return p


def _endpoints(args) -> tuple[HPoint, HPoint]:
    a = parse_point(args.src, args.n)
    b = parse_point(args.dst, args.n)
    if a is None and b is None:
        a = b = HPoint.origin(1)
    elif a is None:
        a = HPoint.origin(b.n)
    elif b is None:
        b = HPoint.origin(a.n)
    if a.n != b.n:
        raise UsageError(f"endpoints live in H^{a.n} and H^{b.n}")
    if a == b:
        raise DomainError("endpoints are identical")
    return a, b


def cmd_geodesic(args, out) -> None:
    a, b = _endpoints(args)
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    arcs = connect(a, b)
    g = arcs[0]
    poly = sample_arc(g, args.samples)
    if args.format == "csv":
        out.write(polyline_to_csv(poly))
        return
    doc = {
        "geodesics": [arc_to_json(arc) for arc in arcs],
        "length": arc_length(g),
        "polyline": polyline_to_json(poly),
    }
    if not np.any(a.x - b.x) and not np.any(a.y - b.y):
        doc["note"] = "vertical pair: every rotation of this arc about the axis through the endpoints is also a geodesic"
    out.write(dumps(doc))


def cmd_distance(args, out) -> None:
    a = parse_point(args.src, args.n)
    b = parse_point(args.dst, args.n)
    if a is None and b is None:
        out.write(fmt(0.0) + "\n")
        return
    a = HPoint.origin(b.n) if a is None else a
    b = HPoint.origin(a.n) if b is None else b
    if a.n != b.n:
        raise UsageError(f"endpoints live in H^{a.n} and H^{b.n}")
    out.write(fmt(cc_distance(a, b)) + "\n")


def cmd_bubble(args, out, err) -> None:
    n = args.n
    if not 1 <= n <= 2:
        raise UsageError("--n must be 1 or 2 for bubble sampling")
    if args.T == 0:
        raise DomainError("--T must be non-zero")
    if args.grid_theta < 1 or args.grid_s < 2:
        raise UsageError("--grid-theta must be >= 1 and --grid-s >= 2")
    thetas = [TWO_PI * k / args.grid_theta for k in range(args.grid_theta)]
    s_values = np.linspace(0.0, TWO_PI, args.grid_s)
    lines = [",".join(bubble_header(n))]
    for theta in itertools.product(thetas, repeat=n):
        for s in s_values:
            p = bubble_sample(args.T, n, theta, s)
            row = [*theta, s, *p.x, *p.y, p.t]
            lines.append(",".join(fmt(v) for v in row))
    out.write("\n".join(lines) + "\n")
    if args.check_symmetry:
        rep = bubble_symmetry_check(args.T, n, args.samples, args.seed)
        verdict = "pass" if rep.all_passed else "fail"
        detail = " ".join(f"{k}={v:.3e}" for k, v in rep.errors.items())
        err.write(f"symmetry-check: {verdict} ({detail})\n")


def cmd_hull_growth(args, out, err) -> None:
    if args.depth < 4:
        raise UsageError("--depth must be >= 4")
    try:
        seq = hull_points(args.depth, args.n)
        rep = growth_certificate(seq, threshold=args.threshold, search_limit=max(args.depth, args.search_limit))
    except OverflowError as exc:
        raise DomainError(str(exc)) from exc
    out.write(growth_to_csv(rep))
    first = "none" if rep.first_exceeding is None else str(rep.first_exceeding)
    err.write(
        f"c={fmt(rep.c)} all_pass={'true' if rep.passed else 'false'} "
        f"first_m_with_r_m_above_{fmt(args.threshold)}={first}\n"
    )


def cmd_convexity_check(args, out) -> None:
    try:
        u = builtin_field(args.function)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    n = u.n if u.n is not None else args.n
    rep = scan_for_witness(u, trials=args.trials, seed=args.seed, n=n, grid=args.grid)
    out.write(dumps(report_to_json(rep)))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heisgeo", description="Heisenberg group geodesics, distances and hull growth.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def endpoints(p):
        p.add_argument("--from", dest="src", required=True, help="start point")
        p.add_argument("--to", dest="dst", required=True, help="end point")
        p.add_argument("--n", type=int, default=None, help="dimension, needed only if both points are 'origin'")

    p = sub.add_parser("geodesic", help="geodesic between two points, with samples")
    endpoints(p)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("distance", help="Carnot-Caratheodory distance")
    endpoints(p)

    p = sub.add_parser("bubble", help="sample the bubble over (0, T) as CSV")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--grid-theta", type=int, default=8)
    p.add_argument("--grid-s", type=int, default=33)
    p.add_argument("--check-symmetry", action="store_true", help="also run the symmetry check (result on stderr)")
    p.add_argument("--samples", type=int, default=200, help="random samples for --check-symmetry")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("hull-growth", help="radius recursion and growth certificate as CSV")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--threshold", type=float, default=1e6)
    p.add_argument("--search-limit", type=int, default=200)
    p.add_argument("--n", type=int, default=1)

    p = sub.add_parser("convexity-check", help="search random geodesics for a convexity violation")
    p.add_argument("--function", required=True, help="const[:k], t-coord, cc-dist-origin, example1-indicator")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--grid", type=int, default=64)
    return parser


def _attach_point_values(argv: list[str]) -> list[str]:
    """Glue ``--from``/``--to`` to their value so points such as ``-1,0,2`` are not read as flags."""
    out = []
    k = 0
    while k < len(argv):
        tok = argv[k]
        if tok in ("--from", "--to") and k + 1 < len(argv):
            out.append(f"{tok}={argv[k + 1]}")
            k += 2
        else:
            out.append(tok)
            k += 1
    return out


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    argv = _attach_point_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "geodesic":
            cmd_geodesic(args, out)
        elif args.command == "distance":
            cmd_distance(args, out)
        elif args.command == "bubble":
            cmd_bubble(args, out, err)
        elif args.command == "hull-growth":
            cmd_hull_growth(args, out, err)
        elif args.command == "convexity-check":
            cmd_convexity_check(args, out)
    except UsageError as exc:
        err.write(f"heisgeo: error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, ValueError, ArithmeticError) as exc:
        err.write(f"heisgeo: {exc}\n")
        return EXIT_DOMAIN
    return 0


if __name__ == "__main__":
    sys.exit(main())
