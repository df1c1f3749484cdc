"""Flat-torus geometry for dimensions 1 and 2.

Every game is played on R^u/Z^u (u in {1, 2}) with the wrap-around
Euclidean metric. Ball radii are capped at 1/4, below the injectivity
threshold, so every Ball is an honest metric ball and the volume power
law is exact: vol = 2*rho for u=1 and pi*rho^2 for u=2, with the same
constant on both sides of the power-law sandwich.

All operations here are pure functions on immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

RADIUS_CAP = 0.25  # injectivity threshold: metric balls only below this


def wrap(x: float) -> float:
    """Reduce a coordinate mod 1 into [0, 1)."""
    x = x % 1.0
    # x % 1.0 can return 1.0 for tiny negative inputs
    return x if x < 1.0 else 0.0


def wrap_diff(a: float, b: float) -> float:
    """Shortest signed displacement from b to a on the circle, in [-1/2, 1/2)."""
    d = (a - b) % 1.0
    return d - 1.0 if d >= 0.5 else d


@dataclass(frozen=True)
class Point:
    """A point of the flat torus, coordinates reduced mod 1."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.coords) not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {len(self.coords)}")
        object.__setattr__(self, "coords", tuple(wrap(float(c)) for c in self.coords))

    @property
    def u(self) -> int:
        return len(self.coords)

    @classmethod
    def of(cls, *coords: float) -> "Point":
        return cls(tuple(coords))


@dataclass(frozen=True)
class Ball:
    """Center plus radius; radius in (0, 1/4] so the ball is metric."""

    center: Point
    radius: float

    def __post_init__(self) -> None:
        if not (0.0 < self.radius <= RADIUS_CAP):
            raise ValueError(f"radius must be in (0, {RADIUS_CAP}], got {self.radius}")

    @property
    def u(self) -> int:
        return self.center.u


def distance(a: Point, b: Point) -> float:
    """Wrap-around Euclidean distance."""
    if a.u != b.u:
        raise ValueError(f"dimension mismatch: {a.u} vs {b.u}")
    if a.u == 1:
        return abs(wrap_diff(a.coords[0], b.coords[0]))
    dx = wrap_diff(a.coords[0], b.coords[0])
    dy = wrap_diff(a.coords[1], b.coords[1])
    return math.hypot(dx, dy)


def contains_ball(outer: Ball, inner: Ball) -> bool:
    """Closed containment: d(centers) <= R - r."""
    return distance(outer.center, inner.center) <= outer.radius - inner.radius


def balls_disjoint(a: Ball, b: Ball) -> bool:
    """Closed-ball disjointness: d(centers) >= r1 + r2; boundary ties count as disjoint."""
    return distance(a.center, b.center) >= a.radius + b.radius


def balls_intersect(a: Ball, b: Ball) -> bool:
    return not balls_disjoint(a, b)


def ball_volume(b: Ball) -> float:
    """Exact ball volume: 2*rho (u=1) or pi*rho^2 (u=2)."""
    if b.u == 1:
        return 2.0 * b.radius
    return math.pi * b.radius * b.radius


def _axis_offsets(radius: float, q: float, slack: float) -> list[float]:
    """Symmetric 1-dim grid of offsets spaced 2q + slack, spanning
    [-(R-q-slack), R-q-slack]."""
    step = 2.0 * q + slack
    half_span = radius - q - slack
    if half_span < 0.0:
        return [0.0]
    n = int(2.0 * half_span / step) + 1
    return [(i - (n - 1) / 2.0) * step for i in range(n)]


def pack_disjoint_subballs(b: Ball, ratio: float) -> list[Ball]:
    """Pairwise-disjoint balls of radius ratio*b.radius inside b.

    Grid packing of touching closed balls (touching counts as disjoint
    under balls_disjoint), padded by a few ulps of absolute slack so the
    verification predicates hold at any center and scale. Count per axis
    is floor(1/ratio) except when 1/ratio is an integer: that exact fit
    has zero float slack, so one ball is given up. Always at least
    floor(1/(2*ratio))^u balls overall. The output is verified against
    the two predicates before being returned.
    """
    if not (0.0 < ratio < 1.0):
        raise ValueError(f"ratio must be in (0,1), got {ratio}")
    q = ratio * b.radius
    if not (0.0 < q <= RADIUS_CAP):
        raise ValueError(f"subball radius {q} outside (0, {RADIUS_CAP}]")
    cx = b.center.coords
    # centers live in [0,1), so each wrap/add rounds by at most ~eps;
    # the slack must dominate that absolute error, not a relative one
    eps = math.ulp(1.0)
    for slack in (8.0 * eps, 64.0 * eps, 512.0 * eps):
        offs = _axis_offsets(b.radius, q, slack)
        if b.u == 1:
            balls = [Ball(Point.of(cx[0] + o), q) for o in offs]
        else:
            lim = b.radius - q - slack
            balls = [
                Ball(Point.of(cx[0] + ox, cx[1] + oy), q)
                for ox in offs
                for oy in offs
                if math.hypot(ox, oy) <= lim
            ]
            if not balls:
                balls = [Ball(b.center, q)]
        if all(contains_ball(b, s) for s in balls) and _pairwise_disjoint(balls, b.u):
            return balls
    raise AssertionError("packing grid failed verification at all slack levels")


def _pairwise_disjoint(balls: list[Ball], u: int) -> bool:
    # Grid offsets stay within [-1/4, 1/4] per axis, so wrap distance equals
    # plain distance and the closest pair is grid-adjacent. For u=1 the list
    # is sorted by offset: checking consecutive pairs is exhaustive. For u=2
    # fall back to all pairs (counts there stay modest).
    if u == 1:
        return all(balls_disjoint(balls[i], balls[i + 1]) for i in range(len(balls) - 1))
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            if not balls_disjoint(balls[i], balls[j]):
                return False
    return True


def ball_to_obj(b: Ball) -> dict:
    """JSON-ready form: {"c": [x(, y)], "r": r} at full double precision."""
    return {"c": list(b.center.coords), "r": b.radius}


def ball_from_obj(obj: dict) -> Ball:
    return Ball(Point(tuple(float(c) for c in obj["c"])), float(obj["r"]))
