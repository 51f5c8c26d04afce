"""Group structure of the Heisenberg group H^n = R^n x R^n x R.

Points carry their dimension ``n`` at runtime; every binary operation checks
that both operands live in the same H^n.  Complex coordinates ``z = x + iy``
are stored as the split real pair ``(x, y)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * np.pi


class DimensionError(ValueError):
    """Operands belong to Heisenberg groups of different dimension."""


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.array(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HPoint:
    """A point ``(x, y, t)`` of H^n."""

    x: np.ndarray
    y: np.ndarray
    t: float

    def __post_init__(self):
        x = _as_vector(self.x, "x")
        y = _as_vector(self.y, "y")
        if x.size == 0 or x.size != y.size:
            raise DimensionError(f"x and y must share a length n >= 1, got {x.size} and {y.size}")
        t = float(self.t)
        if not np.isfinite(t):
            raise ValueError("t must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def z(self) -> np.ndarray:
        return self.x + 1j * self.y

    @classmethod
    def origin(cls, n: int) -> "HPoint":
        return cls(np.zeros(n), np.zeros(n), 0.0)

    @classmethod
    def from_z(cls, z, t: float) -> "HPoint":
        z = np.asarray(z, dtype=complex).reshape(-1)
        return cls(z.real, z.imag, t)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "HPoint":
        """Build from the flat layout ``(x_1..x_n, y_1..y_n, t)``."""
        arr = np.asarray(values, dtype=float).reshape(-1)
        if arr.size < 3 or arr.size % 2 == 0:
            raise DimensionError(f"flat point needs 2n+1 entries, got {arr.size}")
        n = (arr.size - 1) // 2
        return cls(arr[:n], arr[n : 2 * n], arr[-1])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, self.y, [self.t]])

    def is_origin(self) -> bool:
        return not (np.any(self.x) or np.any(self.y) or self.t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HPoint):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and self.t == other.t
        )

    def __hash__(self) -> int:
        return hash((self.x.tobytes(), self.y.tobytes(), self.t))

    def __repr__(self) -> str:
        return f"HPoint(x={self.x.tolist()}, y={self.y.tolist()}, t={self.t!r})"


def _check_same_dim(p: HPoint, q: HPoint) -> None:
    if p.n != q.n:
        raise DimensionError(f"dimension mismatch: H^{p.n} vs H^{q.n}")


def distance_euclid(p: HPoint, q: HPoint) -> float:
    """Max-norm distance between coordinate vectors; used for tolerance checks."""
    _check_same_dim(p, q)
    return float(np.max(np.abs(p.as_array() - q.as_array())))


def skew_form(z, w) -> float:
    """Skew form ``sum(u_i y_i - x_i v_i)`` for ``z = (x, y)``, ``w = (u, v)`` in R^{2n}."""
    z = np.asarray(z, dtype=float).reshape(-1)
    w = np.asarray(w, dtype=float).reshape(-1)
    if z.size != w.size or z.size % 2:
        raise DimensionError(f"skew_form needs two vectors of equal even length, got {z.size} and {w.size}")
    n = z.size // 2
    x, y = z[:n], z[n:]
    u, v = w[:n], w[n:]
    return float(np.dot(u, y) - np.dot(x, v))


def group_mul(p: HPoint, q: HPoint) -> HPoint:
    """Heisenberg product ``p * q``.

    The t-part picks up ``2 * sum(x~_i y_i - x_i y~_i)`` where ``p = (x, y, t)``
    and ``q = (x~, y~, t~)``.
    """
    _check_same_dim(p, q)
    correction = 2.0 * (np.dot(q.x, p.y) - np.dot(p.x, q.y))
    return HPoint(p.x + q.x, p.y + q.y, p.t + q.t + correction)


def left_translate(p: HPoint, q: HPoint) -> HPoint:
    """Image of ``q`` under the left translation by ``p``."""
    return group_mul(p, q)


def inverse(p: HPoint) -> HPoint:
    return HPoint(-p.x, -p.y, -p.t)


def torus_angle(theta, n: int) -> np.ndarray:
    """Normalise an angle vector into [0, 2pi)^n."""
    arr = np.array(theta, dtype=float).reshape(-1)
    if arr.size != n:
        raise DimensionError(f"torus angle has length {arr.size}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("torus angle has non-finite entries")
    arr = np.mod(arr, TWO_PI)
    # mod can round up to exactly 2pi for tiny negative inputs
    arr[arr >= TWO_PI] = 0.0
    return arr


def rotate(theta, p: HPoint) -> HPoint:
    """Rotation about the t axis: ``z_j -> exp(i theta_j) z_j``, t unchanged."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.size != p.n:
        raise DimensionError(f"torus angle has length {theta.size}, point lives in H^{p.n}")
    c, s = np.cos(theta), np.sin(theta)
    return HPoint(c * p.x - s * p.y, s * p.x + c * p.y, p.t)


def conj_J(p: HPoint) -> HPoint:
    """Complex conjugation ``(z, t) -> (conj z, t)``."""
    return HPoint(p.x, -p.y, p.t)


def flip(p: HPoint) -> HPoint:
    return HPoint(p.x, -p.y, -p.t)


def tau_project(p: HPoint) -> HPoint:
    """Drop the imaginary part of z: ``(x + iy, t) -> (x, t)``."""
    return HPoint(p.x, np.zeros(p.n), p.t)


def xy_project(p: HPoint) -> np.ndarray:
    return np.concatenate([p.x, p.y])
