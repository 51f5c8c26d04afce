"""Computational sub-Riemannian geometry on the Heisenberg group H^n."""
from .core import (
    DimensionError,
    HPoint,
    conj_J,
    flip,
    group_mul,
    inverse,
    left_translate,
    rotate,
    skew_form,
    tau_project,
    torus_angle,
    xy_project,
)
from .geodesics import (
    Arc,
    GeodesicArc,
    Polyline,
    Segment,
    arc_length,
    cc_distance,
    connect,
    connect_origin,
    eval_arc,
    generating_geodesic,
    horizontality_residual,
    is_horizontal_segment,
    mu,
    sample_arc,
    solve_mu,
)

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "DimensionError",
    "GeodesicArc",
    "HPoint",
    "Polyline",
    "Segment",
    "arc_length",
    "cc_distance",
    "conj_J",
    "connect",
    "connect_origin",
    "eval_arc",
    "flip",
    "generating_geodesic",
    "group_mul",
    "horizontality_residual",
    "inverse",
    "is_horizontal_segment",
    "left_translate",
    "mu",
    "rotate",
    "sample_arc",
    "skew_form",
    "solve_mu",
    "tau_project",
    "torus_angle",
    "xy_project",
]
