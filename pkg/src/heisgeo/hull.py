"""Witness trajectory of the iterated geodesic hull of two points on the t axis.

Starting from ``A = {origin, (0, T0)}`` the hull iteration adds every geodesic
between points already reached.  The sets themselves are never materialised;
instead we follow one explicit chain:

* ``p_m``, ``q_m`` are the projections (``y -> 0``) of ``sigma_{m-1}(pi/2)``
  and ``sigma_{m-1}(3pi/2)``; they differ only in t,
* ``sigma_m`` is the translated generating geodesic from ``p_m`` to ``q_m``
  with radius ``r_m = |R_m|``.

``r_m`` grows geometrically for m >= 3, which is what drives the hull to
cover the whole group.  Bubble helpers sample and test the first hull
level, the surface of revolution of the generating geodesic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ._config import tolerance
from .core import (
    TWO_PI,
    HPoint,
    conj_J,
    distance_euclid,
    flip,
    group_mul,
    inverse,
    rotate,
    tau_project,
    torus_angle,
)
from .geodesics import (
    _one_minus_cos,
    eval_arc,
    generating_geodesic,
    s_minus_sin,
    translate_arc,
)

C_CONST = (10.0 - 3.0 * math.pi) / (10.0 * math.pi)
BASE_RATIO = (math.pi + 2.0) / (2.0 * math.pi)
DEFAULT_DEPTH = 50


def radius_recursion(depth: int, T0: float = 1.0) -> np.ndarray:
    """Radii ``r_1..r_depth`` of the chain of generating geodesics.

    ``r_1^2 = T0 / 4pi``, ``r_2^2 = (pi+2)/(2pi) r_1^2`` and for m >= 3

        r_m^2 = (pi+2)/(2pi) r_{m-1}^2 + (r_1 + ... + r_{m-2}) r_{m-1} / pi.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if not T0 > 0:
        raise ValueError("T0 must be positive")
    r = np.empty(depth)
    r[0] = math.sqrt(T0 / (4.0 * math.pi))
    if depth >= 2:
        r[1] = math.sqrt(BASE_RATIO * r[0] ** 2)
    partial = float(r[0])
    for m in range(3, depth + 1):
        prev = float(r[m - 2])
        sq = prev * prev * BASE_RATIO + partial * prev / math.pi
        if not math.isfinite(sq):
            raise OverflowError(f"radius r_{m} overflows double precision")
        r[m - 1] = math.sqrt(sq)
        partial += prev
    return r


def radius_recursion_vector(depth: int, n: int, T0: float = 1.0) -> np.ndarray:
    """Same recursion carried out on the vectors ``R_m`` with inner products.

    Uses the gap ``2 |R_{m-1}|^2 (pi+2) + 4 <R_1+...+R_{m-2}, R_{m-1}>`` and
    ``|R_m|^2 = gap / 4pi``; returns the norms.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    ones = np.ones(n) / math.sqrt(n)
    R = [math.sqrt(T0 / (4.0 * math.pi)) * ones]
    total = np.zeros(n)
    for _ in range(2, depth + 1):
        prev = R[-1]
        gap = 2.0 * np.dot(prev, prev) * (math.pi + 2.0) + 4.0 * np.dot(total, prev)
        R.append(math.sqrt(gap / (4.0 * math.pi)) * ones)
        total = total + prev
    return np.array([np.linalg.norm(v) for v in R])


@dataclass(frozen=True, eq=False)
class HullSequence:
    """Radii and endpoint pairs of the witness chain; lists are indexed by ``m - 1``."""

    n: int
    depth: int
    T0: float
    r: np.ndarray
    p: list[HPoint]
    q: list[HPoint]
    c_const: float = C_CONST
    # hull level reached by p_m/q_m and by sigma_m; bookkeeping only
    levels: dict = field(default_factory=dict)

    def p_m(self, m: int) -> HPoint:
        self._check_m(m, 1)
        return self.p[m - 1]

    def q_m(self, m: int) -> HPoint:
        self._check_m(m, 1)
        return self.q[m - 1]

    def R_m(self, m: int) -> np.ndarray:
        self._check_m(m, 1)
        return np.full(self.n, self.r[m - 1] / math.sqrt(self.n))

    def _check_m(self, m: int, lowest: int) -> None:
        if not lowest <= m <= self.depth:
            raise ValueError(f"m={m} outside [{lowest}, {self.depth}]")


def _closed_form(r: np.ndarray, n: int, m: int, s: float) -> HPoint:
    unit = np.ones(n) / math.sqrt(n)
    R = [rj * unit for rj in r[:m]]
    Rm = R[m - 1]
    before = np.sum(R[: m - 1], axis=0) if m > 1 else np.zeros(n)
    sin_s = math.sin(s)
    x = before + float(_one_minus_cos(s)) * Rm
    y = sin_s * Rm
    t = 2.0 * (math.pi / 2.0 - 1.0) * sum(float(np.dot(v, v)) for v in R[: m - 1])
    t += 2.0 * s_minus_sin(s) * float(np.dot(Rm, Rm))
    running = np.zeros(n)
    for j in range(1, m - 1):
        running = running + R[j - 1]
        t -= 2.0 * float(np.dot(running, R[j]))
    t -= 2.0 * sin_s * float(np.dot(before, Rm))
    return HPoint(x, y, t)


def _check_s(s: float) -> float:
    s = float(s)
    if not -1e-12 <= s <= TWO_PI * (1 + 1e-12):
        raise ValueError(f"s={s!r} outside [0, 2pi]")
    return min(max(s, 0.0), TWO_PI)


def hull_points(depth: int = DEFAULT_DEPTH, n: int = 1, T0: float = 1.0) -> HullSequence:
    """Build the witness chain ``p_m, q_m`` for ``m = 1..depth``.

    ``p_1, q_1`` are the two seed points on the t axis.
    """
    if depth < 2:
        raise ValueError("depth must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    r = radius_recursion(depth, T0)
    p = [HPoint.origin(n)]
    q = [HPoint(np.zeros(n), np.zeros(n), T0)]
    gen = generating_geodesic(T0, n)
    p.append(tau_project(eval_arc(gen, math.pi / 2)))
    q.append(tau_project(eval_arc(gen, 3 * math.pi / 2)))
    for m in range(3, depth + 1):
        p.append(tau_project(_closed_form(r, n, m - 1, math.pi / 2)))
        q.append(tau_project(_closed_form(r, n, m - 1, 3 * math.pi / 2)))
    levels = {
        "points": {m: 2 * m - 2 for m in range(2, depth + 1)},
        "sigma": {m: 2 * m - 1 for m in range(2, depth + 1)},
    }
    return HullSequence(n=n, depth=depth, T0=float(T0), r=r, p=p, q=q, levels=levels)


def sigma_eval(seq: HullSequence, m: int, s: float) -> HPoint:
    """Closed-form point of ``sigma_m`` at parameter ``s`` in [0, 2pi]."""
    seq._check_m(m, 2)
    return _closed_form(seq.r, seq.n, m, _check_s(s))


def sigma_oracle(seq: HullSequence, m: int, s: float) -> HPoint:
    """``sigma_m(s)`` rebuilt from scratch by group operations.

    Each step measures the vertical gap ``p^-1 * q`` directly, takes the
    generating geodesic of that height and translates it by ``p``.  Only
    ``seq.n`` and ``seq.T0`` are read, never the stored radii.
    """
    seq._check_m(m, 2)
    s = _check_s(s)
    arc = generating_geodesic(seq.T0, seq.n)
    for _ in range(2, m + 1):
        p = tau_project(eval_arc(arc, math.pi / 2))
        q = tau_project(eval_arc(arc, 3 * math.pi / 2))
        gap = group_mul(inverse(p), q)
        arc = translate_arc(p, generating_geodesic(gap.t, seq.n))
    return eval_arc(arc, s)


def vertical_gap(seq: HullSequence, m: int) -> HPoint:
    """``p_m^-1 * q_m``; purely vertical."""
    return group_mul(inverse(seq.p_m(m)), seq.q_m(m))


@dataclass
class GrowthRow:
    m: int
    r: float
    r_sq: float
    ratio: float | None
    eq01_margin: float | None
    passed: bool | None


@dataclass
class GrowthReport:
    c: float
    rows: list[GrowthRow]
    base_ratio: float
    all_ratios_pass: bool
    margins_positive: bool
    threshold: float
    first_exceeding: int | None

    @property
    def passed(self) -> bool:
        return self.all_ratios_pass and self.margins_positive


def growth_certificate(seq: HullSequence, threshold: float = 1e6, search_limit: int = 200) -> GrowthReport:
    """Check ``r_m^2 > (1 + c) r_{m-1}^2`` for m >= 3 and the supporting inequality

        25 (r_1 + ... + r_{m-2})^2 > pi^2 r_{m-1}^2.

    ``first_exceeding`` is the first m with ``r_m > threshold``, continuing the
    recursion up to ``search_limit`` if the sequence is too short.
    """
    if seq.depth < 4:
        raise ValueError("growth certificate needs depth >= 4")
    r = seq.r
    rows = []
    partial = 0.0
    for m in range(1, seq.depth + 1):
        ratio = margin = passed = None
        if m >= 2:
            ratio = r[m - 1] ** 2 / r[m - 2] ** 2
        if m >= 3:
            partial += r[m - 3]
            margin = 25.0 * partial**2 - math.pi**2 * r[m - 2] ** 2
            passed = ratio > 1.0 + C_CONST
        rows.append(GrowthRow(m, float(r[m - 1]), float(r[m - 1] ** 2), ratio, margin, passed))
    tail = [row for row in rows if row.m >= 3]

    first = None
    radii = r
    if not np.any(radii > threshold) and search_limit > seq.depth:
        radii = radius_recursion(search_limit, seq.T0)
    hits = np.nonzero(radii > threshold)[0]
    if hits.size:
        first = int(hits[0]) + 1
    return GrowthReport(
        c=C_CONST,
        rows=rows,
        base_ratio=float(r[1] ** 2 / r[0] ** 2),
        all_ratios_pass=all(row.passed for row in tail),
        margins_positive=all(row.eq01_margin > 0 for row in tail),
        threshold=threshold,
        first_exceeding=first,
    )


# ---------------------------------------------------------------- bubbles


def bubble_sample(T: float, n: int, theta, s: float) -> HPoint:
    """Point of the bubble over ``(0, T)``: generating geodesic at ``s`` rotated by ``theta``."""
    return rotate(torus_angle(theta, n), eval_arc(generating_geodesic(T, n), s))


def bubble_preimage(T: float, n: int, p: HPoint) -> tuple[np.ndarray, float, float]:
    """Find ``(theta, s)`` with ``bubble_sample(T, n, theta, s) ~ p``.

    Returns ``(theta, s, residual)`` where ``residual`` is the max-norm
    reconstruction error; a small residual certifies that ``p`` lies on the
    bubble.  The arc parameter is recovered both from the height (well
    conditioned near s = pi) and from ``|z|`` (well conditioned near 0, 2pi);
    the better candidate wins.
    """
    gen = generating_geodesic(T, n)
    chir = gen.chirality
    h = TWO_PI * p.t / T
    h = min(max(h, 0.0), TWO_PI)
    if h <= 0.0:
        s_height = 0.0
    elif h >= TWO_PI:
        s_height = TWO_PI
    else:
        s_height = brentq(lambda s: s_minus_sin(s) - h, 0.0, TWO_PI, xtol=1e-15, rtol=1e-15)
    rho = float(np.linalg.norm(p.z)) / (2.0 * gen.radius)
    s_mag = 2.0 * math.asin(min(1.0, rho))

    best = None
    for s in (s_height, s_mag, TWO_PI - s_mag):
        factor = float(_one_minus_cos(s)) + 1j * chir * math.sin(s)
        if abs(factor) > 0:
            theta = torus_angle(np.angle(p.z) - np.angle(factor), n)
        else:
            theta = np.zeros(n)
        err = distance_euclid(bubble_sample(T, n, theta, s), p)
        if best is None or err < best[2]:
            best = (theta, s, err)
    return best


@dataclass
class BubbleReport:
    T: float
    n: int
    samples: int
    tol: float
    errors: dict[str, float]
    passed: dict[str, bool]

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())


def bubble_symmetry_check(T: float, n: int, samples: int = 200, seed: int = 0, tol: float | None = None) -> BubbleReport:
    """Random-sample check of the bubble symmetries.

    * ``conj``: complex conjugates of bubble points lie on the bubble;
    * ``flip``: ``(x, -y, -t)`` maps the T-bubble onto the (-T)-bubble;
    * ``rotation``: rotations act within the bubble and ``theta`` then ``-theta`` is the identity;
    * ``reflection``: ``t -> T - t`` maps the bubble to itself, realised by
      conjugating the generating geodesic at ``2pi - s``;
    * ``reflection_t``: ``t(2pi - s) = T - t(s)`` on the generating geodesic, at 1e-12.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    tol = tolerance(1e-9) if tol is None else tol
    scale = max(1.0, abs(T))
    rng = np.random.default_rng(seed)
    gen = generating_geodesic(T, n)
    errors = dict.fromkeys(["conj", "flip", "rotation", "reflection", "reflection_t"], 0.0)

    def bump(key, value):
        errors[key] = max(errors[key], float(value))

    for _ in range(samples):
        theta = rng.uniform(0.0, TWO_PI, n)
        phi = rng.uniform(0.0, TWO_PI, n)
        s = float(rng.uniform(0.0, TWO_PI))
        pt = bubble_sample(T, n, theta, s)

        bump("conj", bubble_preimage(T, n, conj_J(pt))[2])

        bump("flip", bubble_preimage(-T, n, flip(pt))[2])
        bump("flip", distance_euclid(flip(pt), bubble_sample(-T, n, -theta, s)))

        bump("rotation", distance_euclid(rotate(phi, pt), bubble_sample(T, n, theta + phi, s)))
        bump("rotation", distance_euclid(rotate(-theta, pt), eval_arc(gen, s)))

        mirrored = HPoint(pt.x, pt.y, T - pt.t)
        bump("reflection", bubble_preimage(T, n, mirrored)[2])
        bump("reflection", distance_euclid(mirrored, rotate(theta, conj_J(eval_arc(gen, TWO_PI - s)))))

        t_fwd = eval_arc(gen, s).t
        t_back = eval_arc(gen, TWO_PI - s).t
        bump("reflection_t", abs(t_back - (T - t_fwd)))

    limits = {key: tol * scale for key in errors}
    limits["reflection_t"] = min(limits["reflection_t"], 1e-12 * scale)
    passed = {key: errors[key] <= limits[key] for key in errors}
    return BubbleReport(T=float(T), n=n, samples=samples, tol=tol, errors=errors, passed=passed)
