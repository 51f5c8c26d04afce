"""Independent reference computations used by the tests.

Nothing here calls the solver or closed forms under test; each oracle is a
direct transcription of the defining relation, solved with scipy.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from heisgeo.core import HPoint, group_mul, inverse
from heisgeo.geodesics import _eval_arrays, param_range


def distance_from_origin(p: HPoint) -> float:
    """CC distance from the origin via the endpoint relation of the arc family.

    A geodesic of parameter length s reaching horizontal radius |z| rises by
    |z|^2 (s - sin s) / (2 sin^2(s/2)); its length is s |z| / (2 sin(s/2)).
    """
    zz = float(np.sum(p.x**2 + p.y**2))
    t = abs(p.t)
    if t == 0:
        return math.sqrt(zz)
    if zz == 0:
        return math.sqrt(math.pi * t)
    k = t / zz
    s = brentq(lambda s: (s - math.sin(s)) / (2 * math.sin(s / 2) ** 2) - k, 1e-12, 2 * math.pi - 1e-12,
               xtol=1e-15, rtol=1e-15, maxiter=500)
    return s * math.sqrt(zz) / (2 * math.sin(s / 2))


def distance(p: HPoint, q: HPoint) -> float:
    return distance_from_origin(group_mul(inverse(p), q))


def quadrature_length(g, panels: int = 10_000) -> float:
    """Projected length by Simpson's rule on central-difference speeds."""
    lo, hi = param_range(g)
    s = np.linspace(lo, hi, panels + 1)
    h = 1e-6 * (hi - lo)
    xp, yp, _ = _eval_arrays(g, np.clip(s + h, lo, hi))
    xm, ym, _ = _eval_arrays(g, np.clip(s - h, lo, hi))
    width = np.clip(s + h, lo, hi) - np.clip(s - h, lo, hi)
    speed = np.sqrt(np.sum((xp - xm) ** 2 + (yp - ym) ** 2, axis=1)) / width
    return float(simpson(speed, x=s))
