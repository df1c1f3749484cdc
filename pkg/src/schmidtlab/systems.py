"""Model dynamical systems on the circle and 2-torus.

Four families share one interface: the linear circle map x -> dx, a
nonlinear perturbation x -> 2x + a*sin(2*pi*x), the conformal torus
endomorphism (x, y) -> (dx, dy), and a skew product whose base expands
by d while the fiber rotates by omega. The game layer needs forward
application, expansion bounds, one-step inverse branches, and the
depth-k preimage components of a small target rectangle that meet a
query ball.

Component enumeration for the linear kinds runs in exact rational
arithmetic (component centers are (y + i) / d^k), so membership in the
query window is decided exactly. The nonlinear map is inverted by
bisection on its monotone lift; deep preimages come from a depth-first
walk pruned against forward envelopes of the window, which keeps the
live set near one interval per level whenever the window is small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BranchSeparationError, DepthCapExceeded
from .torus import Ball, Point, distance, wrap, wrap_diff

DEPTH_CAP = 40
_MAX_COMPONENTS = 1 << 20
# windowed enumerations serve the danger bookkeeping, whose legal counts
# stay under N; anything past this is a probe outside the operating
# regime and gets refused before the translate loop runs
_MAX_WINDOW_COMPONENTS = 1 << 14
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SystemSpec:
    kind: str
    u: int               # dimension the game is played in
    degree: int          # per-axis expansion factor
    sigma1: float        # inf of the unstable derivative
    sigma2: float        # sup of the unstable derivative
    holder_l: float      # distortion numerator in K(c) = exp(l c^theta / (sigma1^theta - 1))
    holder_theta: float
    a: float = 0.0       # nonlinear amplitude
    omega_rot: float = 0.0
    leaf_z0: float = 0.0  # fiber coordinate of the leaf the skew game lives on

    @property
    def ambient_u(self) -> int:
        """Dimension of the space the target point lives in."""
        return 2 if self.kind in ("conformal-torus", "skew-product") else 1

    @property
    def branch_count(self) -> int:
        return self.degree ** self.u


def linear_circle(d: int) -> SystemSpec:
    if d < 2:
        raise ValueError("degree must be at least 2")
    return SystemSpec("linear-circle", 1, d, float(d), float(d), 0.0, 1.0)


def nonlinear_circle(a: float) -> SystemSpec:
    # f'(x) = 2 + 2*pi*a*cos(2*pi*x): expanding only while 2*pi*a < 1
    if not 0.0 < _TWO_PI * a < 1.0:
        raise ValueError("amplitude must satisfy 0 < 2*pi*a < 1 to keep the map expanding")
    s1 = 2.0 - _TWO_PI * a
    s2 = 2.0 + _TWO_PI * a
    # sup|f''| / inf f' controls distortion along inverse branches
    holder_l = 4.0 * math.pi ** 2 * a / s1
    return SystemSpec("nonlinear-circle", 1, 2, s1, s2, holder_l, 1.0, a=a)


def conformal_torus(d: int) -> SystemSpec:
    if d < 2:
        raise ValueError("degree must be at least 2")
    return SystemSpec("conformal-torus", 2, d, float(d), float(d), 0.0, 1.0)


def skew_product(d: int, omega_rot: float = 0.37, leaf_z0: float = 0.0) -> SystemSpec:
    if d < 2:
        raise ValueError("degree must be at least 2")
    return SystemSpec(
        "skew-product", 1, d, float(d), float(d), 0.0, 1.0,
        omega_rot=wrap(omega_rot), leaf_z0=wrap(leaf_z0),
    )


@dataclass(frozen=True)
class Rectangle:
    """Region around the avoided point: an interval of full width `width`
    on the circle, a disk of radius width/2 on the torus, or a
    width-sided square about a 2-torus point whose horizontal slice the
    skew-product game tracks.
    """

    target: Point
    width: float

    def __post_init__(self):
        if not 0.0 < self.width < 0.5:
            raise ValueError(f"rectangle width must lie in (0, 0.5), got {self.width}")

    @property
    def half(self) -> float:
        return 0.5 * self.width


@dataclass(frozen=True)
class PreimageComponent:
    """One connected component of a depth-k preimage of the rectangle.

    The enumerated components here are exact intervals or disks, so the
    outer radius R and inner radius r_inner coincide with the hull
    radius; they are carried separately because the distortion claims
    are stated on their ratio.
    """

    depth: int
    hull: Ball
    R: float
    r_inner: float

    @property
    def size(self) -> float:
        # Interval components measure by diameter, disk components by
        # radius; the danger-window constants are calibrated to this.
        return 2.0 * self.hull.radius if self.hull.u == 1 else self.hull.radius


def _exact_component(depth: int, hull: Ball) -> PreimageComponent:
    return PreimageComponent(depth, hull, hull.radius, hull.radius)


def component_to_obj(comp: PreimageComponent) -> dict:
    return {
        "depth": comp.depth,
        "hull": {"c": list(comp.hull.center.coords), "r": comp.hull.radius},
        "R": comp.R,
        "r_inner": comp.r_inner,
    }


def lift(spec: SystemSpec, x: float) -> float:
    """Monotone lift of the base circle map: F(x + 1) = F(x) + degree."""
    if spec.kind == "nonlinear-circle":
        return 2.0 * x + spec.a * math.sin(_TWO_PI * x)
    return float(spec.degree) * x


def unstable_derivative(spec: SystemSpec, x: Point | float) -> float:
    if spec.kind == "nonlinear-circle":
        x0 = x.coords[0] if isinstance(x, Point) else x
        return 2.0 + _TWO_PI * spec.a * math.cos(_TWO_PI * x0)
    return float(spec.degree)


def lift_inverse(spec: SystemSpec, t: float, guess: float | None = None) -> float:
    """Solve lift(x) = t for the unique real x.

    Newton from `guess` when one is supplied, otherwise bisection run to
    bit convergence; the residual |lift(x) - t| ends below 1e-14 either
    way.
    """
    if spec.kind != "nonlinear-circle":
        return t / spec.degree
    if guess is not None:
        x = guess
        for _ in range(60):
            r = lift(spec, x) - t
            if abs(r) <= 1e-15 * (1.0 + abs(t)):
                return x
            x -= r / unstable_derivative(spec, x)
        # Newton wandered; fall through to bisection
    k = math.floor(t / 2.0)
    t0 = t - 2.0 * k  # in [0, 2) = [F(0), F(1))
    lo, hi = 0.0, 1.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if lift(spec, mid) < t0:
            lo = mid
        else:
            hi = mid
    x0 = lo if abs(lift(spec, lo) - t0) <= abs(lift(spec, hi) - t0) else hi
    return x0 + k


def apply(spec: SystemSpec, p: Point) -> Point:
    """One forward step. Skew products act on the full 2-torus."""
    if spec.kind == "conformal-torus":
        x, y = p.coords
        return Point.of(wrap(spec.degree * x), wrap(spec.degree * y))
    if spec.kind == "skew-product":
        if p.u != 2:
            raise ValueError("skew product applies to 2-torus points; embed the leaf first")
        x, z = p.coords
        return Point.of(wrap(spec.degree * x), wrap(z + spec.omega_rot))
    return Point.of(wrap(lift(spec, p.coords[0])))


def embed_leaf(spec: SystemSpec, x: float) -> Point:
    """Lift a game coordinate to the ambient space of the target point."""
    if spec.kind == "skew-product":
        return Point.of(x, spec.leaf_z0)
    if spec.kind == "conformal-torus":
        raise ValueError("conformal games already run in the ambient torus")
    return Point.of(x)


def inverse_branches(spec: SystemSpec, b: Ball) -> list[Ball]:
    """One-step preimage hulls, one per branch.

    The ball must have radius below 1/(2*degree) so distinct branch
    preimages stay disjoint. For the skew product this inverts the base
    coordinate of a leaf ball; the fiber of the preimage leaf sits one
    rotation back.
    """
    if b.u != spec.u:
        raise ValueError(f"ball dimension {b.u} does not match game dimension {spec.u}")
    if b.radius >= 1.0 / (2.0 * spec.degree):
        raise BranchSeparationError(
            f"radius {b.radius} >= 1/(2*{spec.degree}); branch preimages would touch"
        )
    d = spec.degree
    out: list[Ball] = []
    if spec.kind == "conformal-torus":
        cx, cy = b.center.coords
        r = b.radius / d
        for i in range(d):
            for j in range(d):
                out.append(Ball(Point.of((cx + i) / d, (cy + j) / d), r))
        return out
    x = b.center.coords[0]
    for i in range(d):
        lo = lift_inverse(spec, x - b.radius + i)
        hi = lift_inverse(spec, x + b.radius + i)
        out.append(Ball(Point.of(wrap(0.5 * (lo + hi))), 0.5 * (hi - lo)))
    return out


def _strict_int_range(a: Fraction, b: Fraction) -> range:
    """Integers i with a < i < b."""
    return range(math.floor(a) + 1, math.ceil(b))


def _frac_wrap_dist(x: Fraction) -> Fraction:
    r = x % 1
    return min(r, 1 - r)


def _components_linear_1d(
    spec: SystemSpec, y: float, h: float, depth: int, window: Ball | None
) -> list[PreimageComponent]:
    big = spec.degree ** depth
    if big > 1 << 53:
        raise DepthCapExceeded(f"d^k = {big} exceeds exact integer range")
    yf = Fraction(y)
    hf = Fraction(h)
    h_scaled = hf / big
    out: list[PreimageComponent] = []
    if window is None:
        if big > _MAX_COMPONENTS:
            raise ValueError("too many components; pass a window ball")
        idx = range(big)
    else:
        wf = Fraction(window.center.coords[0])
        span = Fraction(window.radius) + h_scaled
        idx = _strict_int_range(big * (wf - span) - yf, big * (wf + span) - yf)
        if len(idx) > _MAX_WINDOW_COMPONENTS:
            raise ValueError("window too large for this depth")
    seen: set[int] = set()
    for i in idx:
        i_mod = i % big
        if i_mod in seen:
            continue
        seen.add(i_mod)
        center = float((yf + i_mod) / big)
        out.append(_exact_component(depth, Ball(Point.of(center), float(h_scaled))))
    out.sort(key=lambda comp: comp.hull.center.coords)
    return out


def _components_conformal(
    spec: SystemSpec, rect: Rectangle, depth: int, window: Ball | None
) -> list[PreimageComponent]:
    big = spec.degree ** depth
    if big > 1 << 53:
        raise DepthCapExceeded(f"d^k = {big} exceeds exact integer range")
    yx = Fraction(rect.target.coords[0])
    yy = Fraction(rect.target.coords[1])
    rf = Fraction(rect.width) / 2 / big  # preimage disk radius
    out: list[PreimageComponent] = []
    if window is None:
        if big * big > _MAX_COMPONENTS:
            raise ValueError("too many components; pass a window ball")
        xs, ys = range(big), range(big)
        check = None
    else:
        wx = Fraction(window.center.coords[0])
        wy = Fraction(window.center.coords[1])
        reach = Fraction(window.radius) + rf
        xs = _strict_int_range(big * (wx - reach) - yx, big * (wx + reach) - yx)
        ys = _strict_int_range(big * (wy - reach) - yy, big * (wy + reach) - yy)
        if len(xs) * len(ys) > _MAX_WINDOW_COMPONENTS:
            raise ValueError("window too large for this depth")
        check = (wx, wy, reach * reach)
    seen: set[tuple[int, int]] = set()
    for i in xs:
        for j in ys:
            key = (i % big, j % big)
            if key in seen:
                continue
            cx = (yx + key[0]) / big
            cy = (yy + key[1]) / big
            if check is not None:
                dx = _frac_wrap_dist(cx - check[0])
                dy = _frac_wrap_dist(cy - check[1])
                if dx * dx + dy * dy >= check[2]:
                    continue
            seen.add(key)
            out.append(
                _exact_component(depth, Ball(Point.of(float(cx), float(cy)), float(rf)))
            )
    out.sort(key=lambda comp: comp.hull.center.coords)
    return out


def _circ_overlap(a1: float, b1: float, a2: float, b2: float) -> bool:
    # Intervals are lift endpoints of circle arcs shorter than the circle.
    c1, h1 = 0.5 * (a1 + b1), 0.5 * (b1 - a1)
    c2, h2 = 0.5 * (a2 + b2), 0.5 * (b2 - a2)
    return abs(wrap_diff(wrap(c1), wrap(c2))) < h1 + h2 + 1e-12


def _components_branch_dfs(
    spec: SystemSpec, y: float, h: float, depth: int, window: Ball | None
) -> list[PreimageComponent]:
    """Depth-first k-fold branch inversion, pruned against forward
    envelopes of the window. Exact for any monotone-lift circle kind;
    the production path for the nonlinear map."""
    if window is not None:
        # a monotone degree-d lift has d^k preimage points per unit arc,
        # so the leaf count is predictable; refuse absurd walks up front
        est = 2.0 * window.radius * float(spec.degree) ** depth
        if est > _MAX_WINDOW_COMPONENTS:
            raise ValueError("window too large for this depth")
    # env[j] covers f^j(window); None means the whole circle.
    env: list[tuple[float, float] | None]
    if window is None:
        env = [None] * (depth + 1)
    else:
        c0 = window.center.coords[0]
        env = [(c0 - window.radius, c0 + window.radius)]
        for _ in range(depth):
            prev = env[-1]
            if prev is None:
                env.append(None)
                continue
            lo = lift(spec, prev[0]) - 1e-12
            hi = lift(spec, prev[1]) + 1e-12
            env.append(None if hi - lo >= 1.0 else (lo, hi))
    out: list[PreimageComponent] = []
    stack: list[tuple[int, float, float]] = [(0, y - h, y + h)]
    while stack:
        m, p, q = stack.pop()
        e = env[depth - m]
        if e is not None and not _circ_overlap(p, q, e[0], e[1]):
            continue
        if m == depth:
            out.append(
                _exact_component(depth, Ball(Point.of(wrap(0.5 * (p + q))), 0.5 * (q - p)))
            )
            cap = _MAX_COMPONENTS if window is None else _MAX_WINDOW_COMPONENTS
            if len(out) > cap:
                raise ValueError("too many components; shrink the window or depth")
            continue
        for i in range(spec.degree):
            stack.append((m + 1, lift_inverse(spec, p + i), lift_inverse(spec, q + i)))
    out.sort(key=lambda comp: comp.hull.center.coords)
    return out


def preimage_components(
    spec: SystemSpec, rect: Rectangle, depth: int, window: Ball | None = None
) -> list[PreimageComponent]:
    """Components of the depth-`depth` preimage of the target rectangle,
    restricted to those meeting `window` when one is given (strict
    overlap; tangency does not count).

    Results are sorted by hull center. The skew product contributes
    components at a given depth only when the rotated leaf passes through
    the target's fiber slice.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth > DEPTH_CAP:
        raise DepthCapExceeded(f"depth {depth} exceeds cap {DEPTH_CAP}")
    if window is not None and window.u != spec.u:
        raise ValueError("window dimension does not match game dimension")
    if rect.target.u != spec.ambient_u:
        raise ValueError("rectangle target dimension does not match the system")
    if spec.kind == "conformal-torus":
        return _components_conformal(spec, rect, depth, window)
    if spec.kind == "skew-product":
        z_depth = wrap(spec.leaf_z0 + depth * spec.omega_rot)
        if abs(wrap_diff(z_depth, rect.target.coords[1])) >= rect.half:
            return []
        return _components_linear_1d(spec, rect.target.coords[0], rect.half, depth, window)
    if spec.kind == "nonlinear-circle":
        return _components_branch_dfs(spec, rect.target.coords[0], rect.half, depth, window)
    return _components_linear_1d(spec, rect.target.coords[0], rect.half, depth, window)


def distortion_constant(spec: SystemSpec, c: float) -> float:
    """K(c) = exp(l * c^theta / (sigma1^theta - 1)); exactly 1 for the
    linear kinds."""
    if spec.holder_l == 0.0:
        return 1.0
    if c < 0.0:
        raise ValueError("scale must be nonnegative")
    num = spec.holder_l * c ** spec.holder_theta
    return math.exp(num / (spec.sigma1 ** spec.holder_theta - 1.0))


def orbit_min_distance(spec: SystemSpec, start: Point, target: Point, steps: int) -> float:
    """Minimum distance from the forward orbit of `start` over steps
    0..steps to `target`. Leaf coordinates of a skew product are embedded
    at the game leaf before iterating."""
    p = start
    if spec.kind == "skew-product" and p.u == 1:
        p = embed_leaf(spec, p.coords[0])
    best = math.inf
    for _ in range(steps + 1):
        best = min(best, distance(p, target))
        p = apply(spec, p)
    return best


def named_system(name: str) -> SystemSpec:
    """Shorthand system names: linear<d>, conformal<d>, skew<d>, and
    nonlinear (the reference perturbation a = 0.1/2pi of doubling)."""
    head = name.rstrip("0123456789")
    tail = name[len(head):]
    if head == "linear" and tail:
        return linear_circle(int(tail))
    if head == "conformal" and tail:
        return conformal_torus(int(tail))
    if head == "skew" and tail:
        return skew_product(int(tail))
    if name == "nonlinear":
        return nonlinear_circle(0.1 / (2.0 * math.pi))
    raise ValueError(
        f"unknown system name {name!r}; use linear<d>, conformal<d>, skew<d>, "
        "nonlinear, or a config file"
    )


def parse_system_config(text: str) -> SystemSpec:
    """Parse 'key = value' lines (# comments allowed) into a system spec.

    Recognized keys: kind (required), d, a, omega_rot, leaf_z0. Unknown
    kinds or keys raise ValueError.
    """
    fields: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, value = line.split("=", 1)
        fields[key.strip().lower()] = value.strip()
    kind = fields.pop("kind", None)
    if kind is None:
        raise ValueError("config missing 'kind'")
    try:
        if kind == "linear-circle":
            spec = linear_circle(int(fields.pop("d")))
        elif kind == "nonlinear-circle":
            spec = nonlinear_circle(float(fields.pop("a")))
        elif kind == "conformal-torus":
            spec = conformal_torus(int(fields.pop("d")))
        elif kind == "skew-product":
            spec = skew_product(
                int(fields.pop("d")),
                omega_rot=float(fields.pop("omega_rot", "0.37")),
                leaf_z0=float(fields.pop("leaf_z0", "0.0")),
            )
        else:
            raise ValueError(f"unknown system kind: {kind!r}")
    except KeyError as missing:
        raise ValueError(f"config missing key {missing.args[0]!r} for kind {kind!r}") from None
    if fields:
        raise ValueError(f"unrecognized config keys: {sorted(fields)}")
    return spec


def spec_to_obj(spec: SystemSpec) -> dict:
    obj: dict = {"kind": spec.kind}
    if spec.kind == "nonlinear-circle":
        obj["a"] = spec.a
    else:
        obj["d"] = spec.degree
    if spec.kind == "skew-product":
        obj["omega_rot"] = spec.omega_rot
        obj["leaf_z0"] = spec.leaf_z0
    return obj


def spec_from_obj(obj: dict) -> SystemSpec:
    kind = obj.get("kind")
    if kind == "linear-circle":
        return linear_circle(int(obj["d"]))
    if kind == "nonlinear-circle":
        return nonlinear_circle(float(obj["a"]))
    if kind == "conformal-torus":
        return conformal_torus(int(obj["d"]))
    if kind == "skew-product":
        return skew_product(
            int(obj["d"]),
            omega_rot=float(obj.get("omega_rot", 0.37)),
            leaf_z0=float(obj.get("leaf_z0", 0.0)),
        )
    raise ValueError(f"unknown system kind: {kind!r}")


def sys_id(spec: SystemSpec) -> str:
    if spec.kind == "nonlinear-circle":
        return f"nonlinear-circle({spec.a:g})"
    return f"{spec.kind}({spec.degree})"
