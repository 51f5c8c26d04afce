"""Convexity of scalar functions along geodesics.

A function ``u`` on H^n is geodesically convex when ``u o gamma`` is convex
for every geodesic ``gamma``.  The tests here are sample based: ``u`` is
evaluated on a uniform parameter grid and every triple ``s_i < s_j < s_k``
is checked against

    u(gamma(s_j)) <= lam u(gamma(s_i)) + (1 - lam) u(gamma(s_k)),
    lam = (s_k - s_j) / (s_k - s_i).

A violation beyond ``slack`` is returned as a replayable witness.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .core import HPoint
from .geodesics import (
    GeodesicArc,
    Polyline,
    cc_distance,
    connect,
    eval_arc,
    param_range,
    sample_arc,
)

SLACK = 1e-9
L_TOL = 1e-12
BOX = 2.0
DEFAULT_GRID = 64

BatchFn = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ScalarField:
    """A named function on H^n evaluated in batches of coordinates.

    ``batch(x, y, t)`` receives arrays of shape (k, n), (k, n), (k,) and
    returns k values.  ``n`` is ``None`` for fields defined in every dimension.
    """

    name: str
    batch: BatchFn
    n: int | None = None

    @classmethod
    def from_point_function(cls, name: str, fn: Callable[[HPoint], float], n: int | None = None) -> "ScalarField":
        def batch(x, y, t):
            return np.array([fn(HPoint(x[k], y[k], t[k])) for k in range(t.size)], dtype=float)

        return cls(name, batch, n)

    def _check(self, n: int) -> None:
        if self.n is not None and n != self.n:
            raise ValueError(f"field {self.name!r} is defined on H^{self.n}, got a point of H^{n}")

    def __call__(self, p: HPoint) -> float:
        self._check(p.n)
        return float(self.batch(p.x[None, :], p.y[None, :], np.array([p.t]))[0])

    def on_polyline(self, c: Polyline) -> np.ndarray:
        self._check(c.n)
        return np.asarray(self.batch(c.x, c.y, c.t), dtype=float)


def const_field(k: float) -> ScalarField:
    return ScalarField(f"const {k:g}", lambda x, y, t: np.full(t.shape, float(k)))


def t_coord_field() -> ScalarField:
    return ScalarField("t-coord", lambda x, y, t: np.array(t, dtype=float))


def cc_dist_origin_field() -> ScalarField:
    def batch(x, y, t):
        n = x.shape[1]
        o = HPoint.origin(n)
        return np.array([cc_distance(o, HPoint(x[k], y[k], t[k])) for k in range(t.size)])

    return ScalarField("cc-dist-origin", batch)


def in_line_L(x, y, t) -> np.ndarray:
    """Membership in ``L = {x = y, t = 0}`` of H^1, exact up to 1e-12."""
    return (np.abs(x[:, 0] - y[:, 0]) <= L_TOL) & (np.abs(t) <= L_TOL)


def example1_indicator_field() -> ScalarField:
    """0 on the line L, 1 elsewhere (H^1 only); discontinuous and non-constant."""
    return ScalarField("example1-indicator", lambda x, y, t: np.where(in_line_L(x, y, t), 0.0, 1.0), n=1)


def affine_field(u: ScalarField, a: float, b: float) -> ScalarField:
    return ScalarField(f"{a:g}*({u.name})+{b:g}", lambda x, y, t: a * u.batch(x, y, t) + b, u.n)


BUILTIN_NAMES = ("const", "t-coord", "cc-dist-origin", "example1-indicator")


def builtin_field(name: str) -> ScalarField:
    """Look up a built-in field; ``const`` takes an optional value (``const 5`` or ``const:5``)."""
    key = name.strip()
    head, _, arg = key.replace(":", " ").replace("=", " ").partition(" ")
    if head == "const":
        return const_field(float(arg) if arg.strip() else 0.0)
    if arg.strip():
        raise ValueError(f"field {head!r} takes no argument")
    if head == "t-coord":
        return t_coord_field()
    if head == "cc-dist-origin":
        return cc_dist_origin_field()
    if head == "example1-indicator":
        return example1_indicator_field()
    raise ValueError(f"unknown function {name!r}; choose from {', '.join(BUILTIN_NAMES)}")


@dataclass
class Witness:
    geodesic: GeodesicArc
    s1: float
    s2: float
    lam: float
    lhs: float
    rhs: float
    geodesic_id: int | None = None

    @property
    def s_mid(self) -> float:
        return self.lam * self.s1 + (1.0 - self.lam) * self.s2

    def replay(self, u: ScalarField) -> tuple[float, float]:
        """Re-evaluate ``(lhs, rhs)`` from scratch."""
        g = self.geodesic
        lhs = u(eval_arc(g, self.s_mid))
        rhs = self.lam * u(eval_arc(g, self.s1)) + (1.0 - self.lam) * u(eval_arc(g, self.s2))
        return lhs, rhs


CONVEX = "convex-on-samples"
VIOLATION = "violation"


@dataclass
class ConvexityReport:
    verdict: str
    witness: Witness | None = None
    trials: int = 1

    @property
    def violated(self) -> bool:
        return self.verdict == VIOLATION


@lru_cache(maxsize=8)
def _triples(grid: int):
    """Index triples i < j < k in lexicographic order with their weights on a uniform grid."""
    idx = np.array(list(itertools.combinations(range(grid), 3)), dtype=np.intp)
    i, j, k = idx[:, 0], idx[:, 1], idx[:, 2]
    lam = (k - j) / (k - i)
    return i, j, k, lam, 1.0 - lam


def convexity_along(u: ScalarField, g: GeodesicArc, grid: int = DEFAULT_GRID, slack: float = SLACK,
                    geodesic_id: int | None = None) -> ConvexityReport:
    """Check convexity of ``u o g`` on a uniform grid over all index triples.

    Returns the first violating triple in lexicographic ``(i, j, k)`` order
    whose replayed inequality still exceeds ``slack``.
    """
    if grid < 3:
        raise ValueError("grid must be >= 3")
    c = sample_arc(g, grid)
    f = u.on_polyline(c)
    s = c.params
    # non-negative second differences on a uniform grid imply every chord
    # inequality; the guard keeps rounding in the chord far below slack
    if np.min(np.diff(f, 2)) >= 0 and np.max(np.abs(f)) * 1e-13 < slack:
        return ConvexityReport(CONVEX)
    i, j, k, lam, lam_c = _triples(grid)
    rhs = lam * f[i]
    rhs += lam_c * f[k]
    rhs += slack
    bad = np.flatnonzero(f[j] > rhs)
    for idx in bad[:32]:
        w = Witness(g, float(s[i[idx]]), float(s[k[idx]]), float(lam[idx]), 0.0, 0.0, geodesic_id)
        lo, hi = param_range(g)
        if not lo <= w.s_mid <= hi:
            continue
        w.lhs, w.rhs = w.replay(u)
        if w.lhs > w.rhs + slack:
            return ConvexityReport(VIOLATION, w)
    return ConvexityReport(CONVEX)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """PCG64 stream for one trial: ``SeedSequence(seed, spawn_key=(trial,))``.

    Streams are independent of each other, so trials may run in any order.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def random_point(rng: np.random.Generator, n: int, box: float = BOX) -> HPoint:
    """Uniform draw from ``[-box, box]^(2n+1)``, ordered x, y, t."""
    return HPoint.from_array(rng.uniform(-box, box, 2 * n + 1))


def scan_for_witness(u: ScalarField, trials: int = 100, seed: int = 0, n: int | None = None,
                     grid: int = DEFAULT_GRID) -> ConvexityReport:
    """Search random geodesics for a convexity violation of ``u``.

    Trial ``k`` draws two endpoints uniformly from ``[-2, 2]^(2n+1)`` using
    :func:`trial_rng` and tests the first geodesic joining them.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = u.n if n is None else n
    n = 1 if n is None else n
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        a, b = random_point(rng, n), random_point(rng, n)
        if a == b:
            continue
        report = convexity_along(u, connect(a, b)[0], grid, geodesic_id=trial)
        if report.violated:
            report.trials = trial + 1
            return report
    return ConvexityReport(CONVEX, trials=trials)


def line_L_sampler(box: float = BOX) -> Callable[[np.random.Generator], HPoint]:
    """Sampler for points of the line ``L = {x = y, t = 0}`` in H^1."""

    def draw(rng):
        a = rng.uniform(-box, box)
        return HPoint([a], [a], 0.0)

    return draw


@dataclass
class ExitEvent:
    pair: int
    a: HPoint
    b: HPoint
    geodesic: GeodesicArc
    s: float
    value: float


@dataclass
class SublevelReport:
    level: float
    pairs_tested: int
    exits: list[ExitEvent] = field(default_factory=list)
    empty: bool = False

    @property
    def certificate(self) -> ExitEvent | None:
        """First exit event; each one shows ``u`` is not convex along its geodesic."""
        return self.exits[0] if self.exits else None


def sublevel_probe(u: ScalarField, p0: HPoint, pairs: int = 50, seed: int = 0, grid: int = DEFAULT_GRID,
                   sampler: Callable[[np.random.Generator], HPoint] | None = None,
                   max_draws: int = 1000) -> SublevelReport:
    """Probe whether the strict sublevel set ``S = {u < u(p0)}`` is closed under geodesics.

    Points of S come from ``sampler`` (default: rejection from the box
    ``[-2, 2]^(2n+1)``).  A geodesic sample with ``u >= u(p0)`` between two
    points of S is an exit event; it certifies that ``u`` is not
    geodesically convex.  If no point of S turns up within ``max_draws`` the
    report is marked empty.
    """
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    n = p0.n
    level = u(p0)
    report = SublevelReport(level=level, pairs_tested=0)

    def draw_in_S(rng):
        for _ in range(max_draws):
            p = sampler(rng) if sampler is not None else random_point(rng, n)
            if u(p) < level:
                return p
        return None

    for pair in range(pairs):
        rng = trial_rng(seed, pair)
        a = draw_in_S(rng)
        b = draw_in_S(rng) if a is not None else None
        if a is None or b is None:
            report.empty = report.pairs_tested == 0
            break
        if a == b:
            continue
        g = connect(a, b)[0]
        c = sample_arc(g, grid)
        values = u.on_polyline(c)
        report.pairs_tested += 1
        outside = np.nonzero(values >= level)[0]
        if outside.size:
            k = int(outside[np.argmax(values[outside])])
            report.exits.append(ExitEvent(pair, a, b, g, float(c.params[k]), float(values[k])))
    return report
