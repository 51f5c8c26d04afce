"""Geodesics of H^n and the Carnot-Caratheodory distance.

Geodesics from the origin are the lifts of circular arcs,

    s -> ((1 - exp(-c i s)) W,  c * 2 |W|^2 (s - sin s)),   s in [0, s_end],

with chirality ``c = +1`` spiralling upward and ``c = -1`` downward.  An
:class:`Arc` stores ``W``, ``c`` and ``s_end`` together with a left-translation
offset ``base``; straight horizontal lines are the :class:`Segment` variant,
parametrised over [0, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ._config import tolerance
from .core import (
    TWO_PI,
    DimensionError,
    HPoint,
    group_mul,
    inverse,
    rotate,
    skew_form,
    xy_project,
)

# solve_mu bracket; mu(_S_HI) ~ 6e18 bounds the solvable ratio
_S_LO = 1e-9
_S_HI = TWO_PI - 1e-9
_MAX_ITER = 200


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Arc:
    """Left translate by ``base`` of an origin-based geodesic arc."""

    base: HPoint
    W: np.ndarray
    chirality: int
    s_end: float

    def __post_init__(self):
        W = np.array(self.W, dtype=complex).reshape(-1)
        if W.size != self.base.n:
            raise DimensionError(f"W has length {W.size}, base lives in H^{self.base.n}")
        if not np.all(np.isfinite(W)) or not np.linalg.norm(W) > 0:
            raise ValueError("W must be finite and non-zero")
        if self.chirality not in (1, -1):
            raise ValueError(f"chirality must be +1 or -1, got {self.chirality!r}")
        s_end = float(self.s_end)
        if not 0.0 < s_end <= TWO_PI:
            raise ValueError(f"s_end must lie in (0, 2pi], got {s_end!r}")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "chirality", int(self.chirality))
        object.__setattr__(self, "s_end", s_end)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def radius(self) -> float:
        """``|W|``, the constant speed of the projected circle."""
        return float(np.linalg.norm(self.W))


@dataclass(frozen=True, eq=False)
class Segment:
    """Straight horizontal segment from ``a`` to ``b``."""

    a: HPoint
    b: HPoint

    def __post_init__(self):
        if self.a.n != self.b.n:
            raise DimensionError("segment endpoints live in different H^n")
        gap = group_mul(inverse(self.a), self.b).t
        scale = max(1.0, float(np.dot(xy_project(self.a), xy_project(self.a))), abs(self.a.t), abs(self.b.t))
        if abs(gap) > tolerance(1e-10) * scale:
            raise ValueError(f"segment is not horizontal (vertical gap {gap:.3e})")

    @property
    def n(self) -> int:
        return self.a.n


GeodesicArc = Union[Arc, Segment]


@dataclass(frozen=True, eq=False)
class Polyline:
    """Sampled curve in R^{2n+1}: ``params[k] -> (x[k], y[k], t[k])``."""

    params: np.ndarray
    x: np.ndarray
    y: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float).reshape(-1)
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        y = np.atleast_2d(np.asarray(self.y, dtype=float))
        t = np.asarray(self.t, dtype=float).reshape(-1)
        k = params.size
        if x.shape[0] != k or y.shape != x.shape or t.size != k:
            raise ValueError("polyline arrays have inconsistent lengths")
        if k > 1 and not np.all(np.diff(params) > 0):
            raise ValueError("polyline params must be strictly increasing")
        for name, arr in (("params", params), ("x", x), ("y", y), ("t", t)):
            object.__setattr__(self, name, arr)

    @classmethod
    def from_points(cls, params, points: list[HPoint]) -> "Polyline":
        if not points:
            raise ValueError("empty polyline")
        return cls(
            params,
            np.stack([p.x for p in points]),
            np.stack([p.y for p in points]),
            np.array([p.t for p in points]),
        )

    def __len__(self) -> int:
        return self.params.size

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def points(self) -> list[HPoint]:
        return [HPoint(self.x[k], self.y[k], self.t[k]) for k in range(len(self))]


def s_minus_sin(s):
    """``s - sin(s)`` without cancellation near zero."""
    s = np.asarray(s, dtype=float)
    small = np.abs(s) < 0.5
    out = s - np.sin(s)
    if np.any(small):
        ss = s[small] if s.ndim else s
        s2 = ss * ss
        # Horner form of s^3/3! - s^5/5! + ... through s^17
        acc = np.zeros_like(ss)
        for k in range(8, 0, -1):
            acc = 1.0 / math.factorial(2 * k + 1) - s2 * acc
        series = ss * s2 * acc
        if s.ndim:
            out[small] = series
        else:
            out = series
    return out if s.ndim else float(out)


def _one_minus_cos(s):
    half = np.sin(np.asarray(s, dtype=float) / 2.0)
    return 2.0 * half * half


def _mu(s: float) -> float:
    return s_minus_sin(s) / (2.0 * _one_minus_cos(s))


def mu(s: float) -> float:
    """``(s - sin s) / (2 (1 - cos s))`` on the open interval (0, 2pi).

    Strictly increasing, ~ s/6 near 0 and unbounded as s -> 2pi.
    """
    s = float(s)
    if not 0.0 < s < TWO_PI:
        raise ValueError(f"mu is defined on (0, 2pi), got s={s!r}")
    return _mu(s)


def _dmu(s: float) -> float:
    return 0.5 - _mu(s) / math.tan(0.5 * s)


def solve_mu(k: float, tol: float = 1e-12) -> float:
    """Invert :func:`mu`: return ``s`` in (0, 2pi) with ``mu(s) = k``.

    Newton steps inside a shrinking bisection bracket; any step that leaves
    the bracket is replaced by bisection.  Stops once
    ``|mu(s) - k| <= tol * max(1, k)`` or the bracket is a few ulps wide.
    """
    k = float(k)
    if not k > 0 or not math.isfinite(k):
        raise ValueError(f"solve_mu needs a finite k > 0, got {k!r}")
    lo, hi = _S_LO, _S_HI
    if k <= _mu(lo):
        # mu ~ s/6 below the bracket; the series is exact to double precision here
        return 6.0 * k
    if k >= _mu(hi):
        raise ValueError(f"k={k!r} exceeds the solvable range (s too close to 2pi)")
    target = tol * max(1.0, k)

    if k < 0.3:
        x = 6.0 * k
    elif k > 5.0:
        x = TWO_PI - math.sqrt(TWO_PI / k)
    else:
        x = math.pi
    x = min(max(x, lo), hi)
    best_x, best_f = x, math.inf
    for _ in range(_MAX_ITER):
        f = _mu(x) - k
        if abs(f) < best_f:
            best_x, best_f = x, abs(f)
        if abs(f) <= target:
            d = _dmu(x)
            polish = x - f / d if d > 0 else x
            if lo <= polish <= hi and abs(_mu(polish) - k) < abs(f):
                return polish
            return x
        if f < 0:
            lo = x
        else:
            hi = x
        if hi - lo <= 4.0 * math.ulp(hi):
            # bracket collapsed to adjacent doubles: best attainable root
            return best_x
        d = _dmu(x)
        step = x - f / d if d > 0 else math.nan
        x = step if lo < step < hi else 0.5 * (lo + hi)
    raise ConvergenceError(f"solve_mu did not converge for k={k!r}")


def param_range(g: GeodesicArc) -> tuple[float, float]:
    if isinstance(g, Arc):
        return 0.0, g.s_end
    return 0.0, 1.0


def _eval_arrays(g: GeodesicArc, s: np.ndarray):
    """Vectorised evaluation; returns (x, y, t) with shapes (k, n), (k, n), (k,)."""
    s = np.asarray(s, dtype=float).reshape(-1)
    if isinstance(g, Segment):
        a, b = g.a, g.b
        w = s[:, None]
        x = (1.0 - w) * a.x + w * b.x
        y = (1.0 - w) * a.y + w * b.y
        t = (1.0 - s) * a.t + s * b.t
        return x, y, t
    factor = _one_minus_cos(s) + 1j * g.chirality * np.sin(s)
    Z = factor[:, None] * g.W[None, :]
    gx, gy = Z.real, Z.imag
    gt = g.chirality * 2.0 * float(np.vdot(g.W, g.W).real) * s_minus_sin(s)
    b = g.base
    x = b.x + gx
    y = b.y + gy
    t = b.t + gt + 2.0 * (gx @ b.y - gy @ b.x)
    return x, y, t


def _check_param(g: GeodesicArc, s: float) -> float:
    lo, hi = param_range(g)
    slack = 1e-12 * max(1.0, hi)
    if not lo - slack <= s <= hi + slack:
        raise ValueError(f"parameter {s!r} outside [{lo}, {hi}]")
    return min(max(s, lo), hi)


def eval_arc(g: GeodesicArc, s: float) -> HPoint:
    """Point of ``g`` at parameter ``s``."""
    s = _check_param(g, float(s))
    x, y, t = _eval_arrays(g, np.array([s]))
    return HPoint(x[0], y[0], t[0])


def endpoint(g: GeodesicArc) -> HPoint:
    return eval_arc(g, param_range(g)[1])


def sample_arc(g: GeodesicArc, samples: int) -> Polyline:
    """Uniform sampling of ``g`` over its full parameter interval."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    lo, hi = param_range(g)
    params = np.linspace(lo, hi, samples)
    return Polyline(params, *_eval_arrays(g, params))


def sample_params(g: GeodesicArc, params) -> Polyline:
    params = np.asarray(params, dtype=float)
    for s in (params[0], params[-1]):
        _check_param(g, float(s))
    return Polyline(params, *_eval_arrays(g, params))


def generating_geodesic(T: float, n: int) -> Arc:
    """Canonical geodesic from the origin to ``(0, T)`` with real, all-equal ``W``."""
    T = float(T)
    if T == 0 or not math.isfinite(T):
        raise ValueError("generating geodesic needs a finite T != 0; use a Segment for t = 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    component = math.sqrt(abs(T)) / (2.0 * math.sqrt(n * math.pi))
    return Arc(HPoint.origin(n), np.full(n, component, dtype=complex), 1 if T > 0 else -1, TWO_PI)


def connect_origin(q: HPoint) -> list[GeodesicArc]:
    """Geodesics from the origin to ``q``.

    * ``z != 0, t != 0``: the unique arc, returned as a singleton.
    * ``t == 0``: the straight segment from the origin.
    * ``z == 0``: the canonical generating geodesic.  Every rotation of it
      about the t axis is also a geodesic to ``q``; all share its length.

    Points so close to the t axis that the arc parameter cannot be resolved
    in double precision (``|z|^2 < ~1e-19 |t|``) fall back to the axis case.
    """
    n = q.n
    if q.is_origin():
        raise ValueError("target coincides with the origin")
    z = q.z
    if not np.any(z):
        return [generating_geodesic(q.t, n)]
    if q.t == 0:
        return [Segment(HPoint.origin(n), q)]
    zz = float(np.vdot(z, z).real)
    # endpoint relation: |t| / |z|^2 = 2 mu(s_end)
    ratio = abs(q.t) / (2.0 * zz)
    if ratio >= _mu(_S_HI):
        return [generating_geodesic(q.t, n)]
    chirality = 1 if q.t > 0 else -1
    s1 = solve_mu(ratio)
    factor = _one_minus_cos(s1) + 1j * chirality * math.sin(s1)
    return [Arc(HPoint.origin(n), z / factor, chirality, s1)]


def translate_arc(p: HPoint, g: GeodesicArc) -> GeodesicArc:
    """Left translate of a geodesic by ``p``."""
    if isinstance(g, Segment):
        return Segment(group_mul(p, g.a), group_mul(p, g.b))
    return Arc(group_mul(p, g.base), g.W, g.chirality, g.s_end)


def rotate_arc(theta, g: GeodesicArc) -> GeodesicArc:
    """Image of a geodesic under the rotation about the t axis."""
    if isinstance(g, Segment):
        return Segment(rotate(theta, g.a), rotate(theta, g.b))
    phase = np.exp(1j * np.asarray(theta, dtype=float))
    return Arc(rotate(theta, g.base), phase * g.W, g.chirality, g.s_end)


def connect(p: HPoint, q: HPoint) -> list[GeodesicArc]:
    """Geodesics from ``p`` to ``q``, obtained by translating ``connect_origin(p^-1 q)``."""
    if p.n != q.n:
        raise DimensionError(f"dimension mismatch: H^{p.n} vs H^{q.n}")
    if p == q:
        raise ValueError("endpoints coincide")
    out = []
    for g in connect_origin(group_mul(inverse(p), q)):
        if isinstance(g, Segment):
            out.append(Segment(p, q))
        else:
            out.append(Arc(p, g.W, g.chirality, g.s_end))
    return out


def arc_length(g: GeodesicArc) -> float:
    """Length of the xy-projection."""
    if isinstance(g, Segment):
        return float(np.linalg.norm(xy_project(g.b) - xy_project(g.a)))
    return g.s_end * g.radius


def cc_distance(p: HPoint, q: HPoint) -> float:
    """Carnot-Caratheodory distance."""
    if p.n != q.n:
        raise DimensionError(f"dimension mismatch: H^{p.n} vs H^{q.n}")
    if p == q:
        return 0.0
    return min(arc_length(g) for g in connect(p, q))


def horizontality_residual(c: Polyline) -> float:
    """Max over interior samples of ``|t' - 2 sum(x'_j y_j - y'_j x_j)|``.

    Derivatives are central differences, so a horizontal curve sampled at
    step h gives a residual of order h^2.
    """
    if len(c) < 3:
        raise ValueError("horizontality residual needs at least 3 samples")
    ds = c.params[2:] - c.params[:-2]
    dx = (c.x[2:] - c.x[:-2]) / ds[:, None]
    dy = (c.y[2:] - c.y[:-2]) / ds[:, None]
    dt = (c.t[2:] - c.t[:-2]) / ds
    form = np.sum(dx * c.y[1:-1] - dy * c.x[1:-1], axis=1)
    return float(np.max(np.abs(dt - 2.0 * form)))


def is_horizontal_segment(a: HPoint, b: HPoint, tol: float | None = None) -> bool:
    """Whether the straight segment between two points at equal height is horizontal."""
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: H^{a.n} vs H^{b.n}")
    tol = tolerance(1e-10) if tol is None else tol
    if abs(a.t - b.t) > tol * max(1.0, abs(a.t)):
        raise ValueError("is_horizontal_segment expects endpoints at the same height")
    # after translating a to the origin the height of b is -2 * skew(a, b)
    return abs(skew_form(xy_project(a), xy_project(b))) <= tol
