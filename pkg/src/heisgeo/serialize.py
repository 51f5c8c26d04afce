"""JSON and CSV encodings shared by the CLI and library users.

CSV numbers are written with 17 significant digits (``'.17g'``), which
round-trips every double and does not depend on the locale.
"""
from __future__ import annotations

import json

import numpy as np

from .convexity import ConvexityReport, Witness
from .core import HPoint
from .geodesics import Arc, GeodesicArc, Polyline, Segment
from .hull import GrowthReport


def fmt(v: float) -> str:
    # + 0.0 folds negative zero
    return format(float(v) + 0.0, ".17g")


def _floats(values) -> list[float]:
    return [float(v) for v in np.asarray(values).reshape(-1)]


def point_to_json(p: HPoint) -> dict:
    return {"n": p.n, "x": _floats(p.x), "y": _floats(p.y), "t": float(p.t)}


def point_from_json(d: dict) -> HPoint:
    try:
        x, y, t = d["x"], d["y"], d["t"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"HPoint JSON needs keys x, y, t: {d!r}") from exc
    p = HPoint(x, y, t)
    if "n" in d and int(d["n"]) != p.n:
        raise ValueError(f"HPoint JSON declares n={d['n']} but x has length {p.n}")
    return p


def arc_to_json(g: GeodesicArc) -> dict:
    if isinstance(g, Segment):
        return {"kind": "segment", "a": point_to_json(g.a), "b": point_to_json(g.b)}
    return {
        "kind": "arc",
        "base": point_to_json(g.base),
        "W_re": _floats(g.W.real),
        "W_im": _floats(g.W.imag),
        "chirality": g.chirality,
        "s_end": g.s_end,
    }


def arc_from_json(d: dict) -> GeodesicArc:
    kind = d.get("kind")
    if kind == "segment":
        return Segment(point_from_json(d["a"]), point_from_json(d["b"]))
    if kind == "arc":
        W = np.asarray(d["W_re"], dtype=float) + 1j * np.asarray(d["W_im"], dtype=float)
        return Arc(point_from_json(d["base"]), W, int(d["chirality"]), float(d["s_end"]))
    raise ValueError(f"unknown geodesic kind {kind!r}")


def polyline_to_json(c: Polyline) -> dict:
    return {"params": _floats(c.params), "points": [point_to_json(p) for p in c.points]}


def polyline_header(n: int) -> list[str]:
    return ["s"] + [f"x{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, n + 1)] + ["t"]


def polyline_to_csv(c: Polyline) -> str:
    lines = [",".join(polyline_header(c.n))]
    for k in range(len(c)):
        row = [c.params[k], *c.x[k], *c.y[k], c.t[k]]
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def polyline_from_csv(text: str) -> Polyline:
    rows = [line.split(",") for line in text.strip().splitlines()]
    header, body = rows[0], np.array(rows[1:], dtype=float)
    n = (len(header) - 2) // 2
    if header != polyline_header(n):
        raise ValueError(f"unexpected polyline header {header}")
    return Polyline(body[:, 0], body[:, 1 : 1 + n], body[:, 1 + n : 1 + 2 * n], body[:, -1])


def witness_to_json(w: Witness) -> dict:
    out = {
        "s1": w.s1,
        "s2": w.s2,
        "lambda": w.lam,
        "lhs": w.lhs,
        "rhs": w.rhs,
        "geodesic": arc_to_json(w.geodesic),
    }
    if w.geodesic_id is not None:
        out["geodesic_id"] = w.geodesic_id
    return out


def witness_from_json(d: dict) -> Witness:
    return Witness(
        geodesic=arc_from_json(d["geodesic"]),
        s1=float(d["s1"]),
        s2=float(d["s2"]),
        lam=float(d["lambda"]),
        lhs=float(d["lhs"]),
        rhs=float(d["rhs"]),
        geodesic_id=d.get("geodesic_id"),
    )


def report_to_json(r: ConvexityReport) -> dict:
    return {
        "verdict": r.verdict,
        "witness": witness_to_json(r.witness) if r.witness is not None else None,
        "trials": r.trials,
    }


GROWTH_HEADER = ["m", "r_m", "r_m_sq", "ratio", "eq01_margin", "pass"]


def growth_to_csv(rep: GrowthReport) -> str:
    """One row per m; ratio, margin and pass are blank where they do not apply."""
    lines = [",".join(GROWTH_HEADER)]
    for row in rep.rows:
        cells = [
            str(row.m),
            fmt(row.r),
            fmt(row.r_sq),
            "" if row.ratio is None else fmt(row.ratio),
            "" if row.eq01_margin is None else fmt(row.eq01_margin),
            "" if row.passed is None else ("true" if row.passed else "false"),
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def bubble_header(n: int) -> list[str]:
    return (
        [f"theta{i}" for i in range(1, n + 1)]
        + ["s"]
        + [f"x{i}" for i in range(1, n + 1)]
        + [f"y{i}" for i in range(1, n + 1)]
        + ["t"]
    )


def dumps(obj) -> str:
    """Single JSON document; rejects NaN/inf so output stays valid JSON."""
    return json.dumps(obj, sort_keys=True, allow_nan=False) + "\n"

