"""Strongly tree-like families, rescaled node measures, and dimension
lower bounds extracted from game trees.

A game tree answers every packed Bob option inside a node with Alice's
reply, so level l holds disjoint balls of one common radius
r_root * (alpha beta)^l, each contained in its parent. The node measure
starts from the volume of the root and flows down proportionally to
child volume; masses are kept as exact rationals so conservation and
the level-stability identity hold with equality, not within a
tolerance.

Trees built here stay inside Alice's waiting-free, danger-free regime:
the opening ball must already be at activation scale and the depth must
not exceed one block, which forces every strategy reply to be
concentric. That keeps million-node and lazily expanded trees exact
while remaining faithful to the strategy (property tests replay the
real strategy along sampled paths and compare).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .alice import StrategyConstants
from .game import GameConfig
from .systems import Rectangle, SystemSpec
from .torus import Ball, Point, ball_volume, pack_disjoint_subballs


def _fit_slope(log_r: list[float], log_m: list[float]) -> tuple[float, list[float]]:
    """Least-squares slope of log m against log r, with residuals."""
    if len(log_r) < 2:
        raise ValueError("need at least two points to fit a slope")
    x = np.asarray(log_r)
    y = np.asarray(log_m)
    slope, intercept = np.polyfit(x, y, 1)
    residuals = list(y - (slope * x + intercept))
    return float(slope), residuals


def _interval_overlap(d: np.ndarray, r_query: float, r_leaf: float) -> np.ndarray:
    """Length of the intersection of two circle arcs with center distance
    d and half-lengths r_query, r_leaf (arcs shorter than a half-circle)."""
    ov = np.minimum(r_query + r_leaf - d, 2.0 * min(r_query, r_leaf))
    return np.clip(ov, 0.0, None)


@dataclass
class LevelData:
    centers: np.ndarray          # (n, u)
    radius: float                # shared by every node of the level
    parents: np.ndarray          # (n,) index into previous level; -1 at root


@dataclass
class TreeFamily:
    """Levels of disjoint same-radius balls, each nested in its parent.

    Synthetic calibration trees carry no system or constants; game trees
    built by build_game_tree carry all four.
    """

    sys: SystemSpec | None
    rect: Rectangle | None
    config: GameConfig
    constants: StrategyConstants | None
    levels: list[LevelData]
    u: int

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def base_volume(self) -> float:
        return ball_volume(self.root)

    @property
    def root(self) -> Ball:
        lv = self.levels[0]
        return Ball(Point.of(*lv.centers[0]), lv.radius)

    def diameters(self) -> list[float]:
        return [2.0 * lv.radius for lv in self.levels]

    def ball_at(self, level: int, i: int) -> Ball:
        lv = self.levels[level]
        return Ball(Point.of(*lv.centers[i]), lv.radius)

    def balls(self, level: int) -> list[Ball]:
        lv = self.levels[level]
        return [Ball(Point.of(*c), lv.radius) for c in lv.centers]


def _assert_concentric_regime(constants: StrategyConstants, opening: Ball, depth: int):
    """The tree builder relies on every Alice reply being concentric,
    which holds exactly when the game activates at the opening ball (so
    block 0's danger window sits strictly above the target width) and
    the tree never leaves block 0."""
    if opening.radius > constants.rho * (1.0 + 1e-12):
        raise ValueError(
            "opening ball above activation scale; derive constants with "
            "first_radius = opening radius"
        )
    if depth > constants.r:
        raise ValueError(
            f"depth {depth} exceeds one block (r = {constants.r}); deeper trees "
            "would need danger bookkeeping"
        )
    lo0 = constants.alpha * opening.radius * (
        (constants.alpha * constants.beta) ** (2 * constants.r - 1)
    )
    if constants.c >= lo0:
        raise ValueError("block-0 danger window reaches the target width")


def default_opening(config: GameConfig, u: int, center: float = 0.5) -> Ball:
    """Opening Bob ball whose reply chain aligns node diameters with
    (alpha beta)^(l+1): radius beta/2 makes d_l exactly that power."""
    radius = min(0.25, 0.5 * config.beta)
    return Ball(Point.of(*([center] * u)), radius)


def build_game_tree(
    sys_spec: SystemSpec,
    rect: Rectangle,
    config: GameConfig,
    constants: StrategyConstants,
    depth: int,
    opening: Ball | None = None,
) -> TreeFamily:
    """Alice's reply tree: the root answers the opening Bob ball; every
    node spawns one child per packed Bob option inside it."""
    u = sys_spec.u
    if opening is None:
        opening = default_opening(config, u)
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    _assert_concentric_regime(constants, opening, depth)
    ab = config.alpha * config.beta
    root_center = np.array([opening.center.coords], dtype=float)
    levels = [LevelData(root_center, config.alpha * opening.radius,
                        np.array([-1], dtype=np.int64))]
    for _ in range(depth):
        prev = levels[-1]
        centers: list[tuple[float, ...]] = []
        parents: list[int] = []
        for i, c in enumerate(prev.centers):
            node = Ball(Point.of(*c), prev.radius)
            for option in pack_disjoint_subballs(node, config.beta):
                centers.append(option.center.coords)
                parents.append(i)
        levels.append(LevelData(np.array(centers, dtype=float),
                                ab * prev.radius,
                                np.array(parents, dtype=np.int64)))
    return TreeFamily(sys_spec, rect, config, constants, levels, u)


@dataclass
class NodeMeasure:
    """Per-level node masses of the rescaled measure, exact rationals.

    level_masses[l][i] is the measure of node i at level l. The measure
    of a level-l node never changes at later levels (children split
    their parent's mass exactly), so the leaf level determines the whole
    family; queries against arbitrary balls spread each leaf's mass
    uniformly over the leaf ball.
    """

    tree: TreeFamily
    level_masses: list[list[Fraction]]
    _leaf_cache: np.ndarray | None = field(default=None, repr=False)

    @property
    def total_mass(self) -> Fraction:
        return self.level_masses[0][0]

    @property
    def leaf_masses(self) -> list[Fraction]:
        return self.level_masses[-1]

    def level_total(self, level: int) -> Fraction:
        return sum(self.level_masses[level], Fraction(0))

    def node_descendant_mass(self, level: int, i: int, at_level: int) -> Fraction:
        """Mass of the level-`level` node i as seen by the level
        `at_level` measure (the telescoping identity makes this equal to
        its own mass)."""
        if at_level < level:
            raise ValueError("at_level must be at or below the node's level")
        keep = np.asarray([i], dtype=np.int64)
        for l in range(level + 1, at_level + 1):
            parents = self.tree.levels[l].parents
            keep = np.nonzero(np.isin(parents, keep))[0]
        return sum((self.level_masses[at_level][j] for j in keep), Fraction(0))

    def diameters(self) -> list[float]:
        return self.tree.diameters()

    def sample_leaf(self, rng: np.random.Generator) -> tuple[float, ...]:
        lv = self.tree.levels[-1]
        return tuple(lv.centers[rng.integers(0, len(lv.centers))])

    def mass_at(self, coords: tuple, r: float) -> float:
        """Leaf-level mass of the ball of radius r at coords;
        one-dimensional leaves contribute the exact overlapping
        fraction, planar leaves count when their center falls inside."""
        lv = self.tree.levels[-1]
        if self._leaf_cache is None:
            self._leaf_cache = np.array([float(m) for m in self.leaf_masses])
        masses = self._leaf_cache
        z = np.asarray([float(x) for x in coords])
        diff = np.abs(lv.centers - z)
        diff = np.minimum(diff, 1.0 - diff)
        if self.tree.u == 1:
            d = diff[:, 0]
            ov = _interval_overlap(d, r, lv.radius)
            return float(np.dot(masses, ov / (2.0 * lv.radius)))
        d = np.hypot(diff[:, 0], diff[:, 1])
        return float(masses[d <= r].sum())

    def mass_in_ball(self, query: Ball) -> float:
        return self.mass_at(query.center.coords, query.radius)


def rescale_measures(tree: TreeFamily) -> NodeMeasure:
    """Flow the root volume down the tree: every node splits its mass
    among its children proportionally to child volume, which is an exact
    equal split because siblings share one radius."""
    root_mass = Fraction(ball_volume(tree.root))
    if root_mass <= 0:
        raise ValueError("zero-volume root; tree corrupted")
    level_masses = [[root_mass]]
    for l in range(1, len(tree.levels)):
        parents = tree.levels[l].parents
        counts = np.bincount(parents, minlength=len(tree.levels[l - 1].centers))
        if counts.min() < 1:
            raise ValueError(f"childless node at level {l - 1}; tree corrupted")
        prev = level_masses[-1]
        level_masses.append(
            [prev[p] / int(counts[p]) for p in parents]
        )
    return NodeMeasure(tree, level_masses)


def packing_count(u: int, beta: float) -> int:
    """Children per node actually produced by the float packing at ratio
    beta (the exact-fit knife edge costs one per axis there)."""
    probe = Ball(Point.of(*([0.5] * u)), 0.25)
    return len(pack_disjoint_subballs(probe, beta))


def _rational(x: float) -> Fraction:
    """The decimal the caller wrote, as an exact rational (float repr
    round-trips the shortest decimal)."""
    return Fraction(str(x))


def _lattice_disk_count(bound: Fraction) -> int:
    """Integer points (a, b) with a^2 + b^2 <= bound^2, exact."""
    b2 = bound * bound
    a_max = math.isqrt(int(b2))
    total = 0
    for a in range(-a_max, a_max + 1):
        rem = b2 - a * a
        if rem < 0:
            continue
        total += 2 * math.isqrt(int(rem)) + 1
    return total


def theoretical_packing_count(u: int, beta: float) -> int:
    """Touching-ball grid count in real arithmetic: floor(1/beta) per
    axis, with the lattice disk filter in the plane."""
    b = _rational(beta)
    if u == 1:
        return int(1 / b)
    return _lattice_disk_count((1 - b) / (2 * b))


def closed_form_bound(u: int, alpha: float, beta: float) -> float:
    """Dimension lower bound with the packing constant substituted in:
    k - log(1/(N(beta) beta^u alpha^k)) / log(1/(alpha beta)), k = u,
    N(beta) the real-arithmetic packing count."""
    n = theoretical_packing_count(u, beta)
    a, b = _rational(alpha), _rational(beta)
    num = math.log(float(1 / (n * b ** u * a ** u)))
    den = math.log(float(1 / (a * b)))
    return u - num / den


@dataclass(frozen=True)
class DimensionBound:
    measured: float
    closed_form: float
    deltas: list[float]
    final_diameter: float


def dimension_lower_bound(tree: TreeFamily, k: int | None = None,
                          measure: NodeMeasure | None = None) -> DimensionBound:
    """Measured bound k - (sum_i log 1/Delta_i) / log(1/d_{L-1}) from the
    tree's own density ratios, alongside the closed form for the same
    (alpha, beta)."""
    if tree.depth < 2:
        raise ValueError("need depth at least 2")
    u = tree.u
    if k is None:
        k = u
    deltas: list[float] = []
    for l in range(tree.depth):
        parents = tree.levels[l + 1].parents
        counts = np.bincount(parents, minlength=len(tree.levels[l].centers))
        child_vol = ball_volume(Ball(Point.of(*([0.0] * u)), tree.levels[l + 1].radius))
        node_vol = ball_volume(Ball(Point.of(*([0.0] * u)), tree.levels[l].radius))
        delta = counts.min() * child_vol / node_vol
        if delta <= 0.0:
            raise ValueError(f"degenerate level {l}: empty children")
        deltas.append(float(delta))
    d_last = 2.0 * tree.levels[tree.depth - 1].radius
    measured = k - sum(math.log(1.0 / d) for d in deltas) / math.log(1.0 / d_last)
    closed = closed_form_bound(u, tree.config.alpha, tree.config.beta)
    return DimensionBound(measured, closed, deltas, d_last)


class LazyTree:
    """One-dimensional game tree expanded on demand in exact rational
    arithmetic.

    Deep trees at small alpha*beta put node spacings below the float
    resolution of absolute positions (ulp of a coordinate near 1/2), so
    centers and radii are Fractions; the touching-chain packing then
    realizes the full floor(1/beta) count with genuinely disjoint
    closed balls. Masses stay floats (they never leave float range).
    """

    def __init__(self, sys_spec: SystemSpec, rect: Rectangle, config: GameConfig,
                 constants: StrategyConstants, depth: int, opening: Ball | None = None):
        if sys_spec.u != 1:
            raise ValueError("lazily expanded trees cover the circle case")
        if opening is None:
            opening = default_opening(config, 1)
        _assert_concentric_regime(constants, opening, depth)
        self.sys = sys_spec
        self.rect = rect
        self.config = config
        self.constants = constants
        self.depth = depth
        self.u = 1
        self._alpha = _rational(config.alpha)
        self._beta = _rational(config.beta)
        self._ab = self._alpha * self._beta
        self._root_center = _rational(opening.center.coords[0])
        self._root_radius = self._alpha * _rational(opening.radius)
        self._children: dict[tuple[int, Fraction], list[Fraction]] = {}
        self._radii = [self._root_radius * self._ab ** l for l in range(depth + 1)]
        self.branching = int(1 / self._beta)
        self._shares = [ball_volume(Ball(opening.center, float(self._root_radius)))
                        / self.branching ** l for l in range(depth + 1)]

    @property
    def total_mass(self) -> float:
        return self._shares[0]

    def diameters(self) -> list[float]:
        return [float(2 * r) for r in self._radii]

    def children_centers(self, level: int, center: Fraction) -> list[Fraction]:
        """Bob-option centers inside the level-`level` node at `center`;
        the child balls sit there with radius shrunk by alpha*beta."""
        key = (level, center)
        got = self._children.get(key)
        if got is None:
            R = self._radii[level]
            q = self._beta * R
            n = self.branching
            # centered touching chain; spans the node exactly when 1/beta
            # is an integer
            got = [center + (2 * i - (n - 1)) * q for i in range(n)]
            self._children[key] = got
        return got

    def sample_leaf(self, rng: np.random.Generator) -> tuple[Fraction, ...]:
        c = self._root_center
        for level in range(self.depth):
            kids = self.children_centers(level, c)
            c = kids[rng.integers(0, len(kids))]
        return (c,)

    def mass_at(self, coords: tuple, r: float) -> float:
        """Mass of the ball of radius r at exact center coords."""
        return self._mass(self._root_center, 0, Fraction(coords[0]), Fraction(r))

    def mass_in_ball(self, query: Ball) -> float:
        return self.mass_at(query.center.coords, query.radius)

    def dimension_lower_bound(self) -> DimensionBound:
        """Same density-ratio bound as the materialized tree, computed
        from the exact per-level quantities (every node has `branching`
        children whose radii shrink by alpha*beta). Logs are taken on
        the rational's integer parts so depth never underflows a float."""
        if self.depth < 2:
            raise ValueError("need depth at least 2")

        def log_frac(f: Fraction) -> float:
            return math.log(f.numerator) - math.log(f.denominator)

        delta = self.branching * self._ab
        d_last = 2 * self._radii[self.depth - 1]
        measured = 1.0 - self.depth * (-log_frac(delta)) / (-log_frac(d_last))
        closed = closed_form_bound(1, self.config.alpha, self.config.beta)
        return DimensionBound(measured, closed, [float(delta)] * self.depth,
                              float(d_last))

    def _mass(self, center: Fraction, level: int, zq: Fraction, rq: Fraction) -> float:
        R = self._radii[level]
        d = abs(center - zq)
        if d > Fraction(1, 2):
            d = 1 - d
        if d >= R + rq:
            return 0.0
        if d <= rq - R:
            return self._shares[level]
        if level == self.depth:
            ov = min(rq + R - d, 2 * min(rq, R))
            if ov <= 0:
                return 0.0
            return self._shares[level] * float(ov / (2 * R))
        return sum(self._mass(k, level + 1, zq, rq)
                   for k in self.children_centers(level, center))


@dataclass(frozen=True)
class FrostmanReport:
    exponent: float
    C: float
    max_ratio: float
    slope: float
    passes: bool
    n_samples: int
    radii: list[float]


def frostman_check(measure, h: float, C: float, n_points: int = 24,
                   seed: int = 0) -> FrostmanReport:
    """Sample leaf points and tree-scale radii; check the growth bound
    mass(B(z, r)) <= C r^h everywhere and fit the observed log-log
    slope. `measure` is anything with mass_at, diameters, sample_leaf,
    and total_mass (NodeMeasure or LazyTree)."""
    rng = np.random.default_rng(seed)
    radii = [0.5 * d for d in measure.diameters()]
    radii = [r for r in radii if r <= 0.25]
    max_ratio = 0.0
    log_r: list[float] = []
    log_m: list[float] = []
    for _ in range(n_points):
        z = measure.sample_leaf(rng)
        for r in radii:
            m = measure.mass_at(z, r)
            if m <= 0.0:
                continue
            max_ratio = max(max_ratio, m / r ** h)
            log_r.append(math.log(r))
            log_m.append(math.log(m))
    slope, _ = _fit_slope(log_r, log_m)
    return FrostmanReport(h, C, max_ratio, slope, max_ratio <= C, n_points, radii)


def uniform_tree(depth: int) -> NodeMeasure:
    """Binary tiling of the interval [0.25, 0.75] carrying Lebesgue
    measure; calibration fixture with exact ratio bound 2 and slope 1."""
    levels = [LevelData(np.array([[0.5]]), 0.25, np.array([-1], dtype=np.int64))]
    for l in range(1, depth + 1):
        n = 1 << l
        radius = 0.25 / n
        centers = 0.25 + (2 * np.arange(n) + 1) * radius
        levels.append(LevelData(centers[:, None], radius,
                                np.arange(n, dtype=np.int64) // 2))
    cfg = GameConfig(alpha=0.5, beta=0.5, stop_radius=1e-12)
    tree = TreeFamily(None, None, cfg, None, levels, 1)
    masses = [[Fraction(1, 2)]]
    for l in range(1, depth + 1):
        masses.append([masses[0][0] / (1 << l)] * (1 << l))
    return NodeMeasure(tree, masses)


def point_mass_tree(depth: int) -> NodeMeasure:
    """Single chain of shrinking balls with all mass at the bottom; the
    negative control that fails every positive Frostman exponent."""
    levels = [LevelData(np.array([[0.5]]), 0.25, np.array([-1], dtype=np.int64))]
    for l in range(1, depth + 1):
        levels.append(LevelData(np.array([[0.5]]), 0.25 * 0.25 ** l,
                                np.array([0], dtype=np.int64)))
    cfg = GameConfig(alpha=0.25, beta=0.9, stop_radius=1e-12)
    tree = TreeFamily(None, None, cfg, None, levels, 1)
    masses = [[Fraction(1, 2)] for _ in range(depth + 1)]
    return NodeMeasure(tree, masses)


@dataclass(frozen=True)
class ProductMeasureReport:
    fiber_slope: float
    transversal_exponent: float
    combined_slope: float
    discretized_slope: float
    exponent: float
    passes: bool
    fiber_count: int
    depth: int
    radii: list[float]


def product_measure_check(
    sys_spec: SystemSpec,
    fiber_count: int,
    depth: int,
    exponent: float | None = None,
    config: GameConfig | None = None,
    constants: StrategyConstants | None = None,
    n_points: int = 12,
    seed: int = 0,
) -> ProductMeasureReport:
    """Product of the fiber game-tree measure with arc length on the
    rotation direction.

    Fiber trees are isomorphic (the rotation never touches the unstable
    coordinate), so one lazily expanded tree serves every fiber. The
    two-dimensional mass of a max-metric ball factorizes into the
    transversal arc length times the fiber mass; the discretized
    integral is the same sum taken over the sampled fibers' cells and
    agrees wherever the window spans at least one cell.
    """
    if sys_spec.kind != "skew-product":
        raise ValueError("product measure lives on the skew product")
    if fiber_count < 8:
        raise ValueError("need at least 8 fibers for the transversal integral")
    from .alice import derive_constants
    if config is None:
        config = GameConfig(alpha=0.1, beta=0.01, stop_radius=1e-9)
    opening = default_opening(config, 1)
    if constants is None:
        constants = derive_constants(sys_spec, config.alpha, config.beta,
                                     opening.radius)
    if exponent is None:
        exponent = 2.0 - 1.0 / 3.0 - 0.1
    rect = Rectangle(Point.of(0.1234, sys_spec.leaf_z0), constants.c)
    fiber = LazyTree(sys_spec, rect, config, constants, depth, opening)
    rng = np.random.default_rng(seed)
    radii = fiber.diameters()[:-1]  # exclude the leaf scale itself
    cells = np.arange(fiber_count) / fiber_count

    log_r: list[float] = []
    log_m: list[float] = []
    log_m_disc: list[float] = []
    log_fiber: list[float] = []
    for _ in range(n_points):
        x = fiber.sample_leaf(rng)
        z = float(rng.uniform(0.0, 1.0))
        for r in radii:
            fm = fiber.mass_at(x, r)
            if fm <= 0.0:
                continue
            exact = min(1.0, 2.0 * r) * fm
            # Riemann sum over fiber cells: weight each sampled fiber by
            # the length its 1/F cell contributes to the z-window
            half_cell = 0.5 / fiber_count
            dz = np.abs(cells - z)
            dz = np.minimum(dz, 1.0 - dz)
            weights = np.clip(
                np.minimum(r + half_cell - dz, 2.0 * min(r, half_cell)), 0.0, None
            )
            disc = float(weights.sum()) * fm
            log_r.append(math.log(r))
            log_fiber.append(math.log(fm))
            log_m.append(math.log(exact))
            if disc > 0.0:
                log_m_disc.append(math.log(disc))
            else:
                log_m_disc.append(-math.inf)
    fiber_slope, _ = _fit_slope(log_r, log_fiber)
    combined_slope, _ = _fit_slope(log_r, log_m)
    finite = [(a, b) for a, b in zip(log_r, log_m_disc) if math.isfinite(b)]
    if len(finite) >= 2:
        disc_slope, _ = _fit_slope([a for a, _ in finite], [b for _, b in finite])
    else:
        disc_slope = math.nan
    return ProductMeasureReport(
        fiber_slope=fiber_slope,
        transversal_exponent=1.0,
        combined_slope=combined_slope,
        discretized_slope=disc_slope,
        exponent=exponent,
        passes=combined_slope >= exponent,
        fiber_count=fiber_count,
        depth=depth,
        radii=radii,
    )


def tree_to_obj(tree: TreeFamily, measure: NodeMeasure | None = None) -> dict:
    """Nested JSON form, root down."""
    def node(level: int, i: int) -> dict:
        lv = tree.levels[level]
        out = {
            "c": [float(x) for x in lv.centers[i]],
            "r": lv.radius,
            "level": level,
        }
        if measure is not None:
            out["mass"] = float(measure.level_masses[level][i])
        if level < tree.depth:
            kids = np.nonzero(tree.levels[level + 1].parents == i)[0]
            out["children"] = [node(level + 1, int(j)) for j in kids]
        return out

    return node(0, 0)


def tree_to_csv(tree: TreeFamily, measure: NodeMeasure | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["level", "center", "radius", "mass"])
    for level, lv in enumerate(tree.levels):
        for i, c in enumerate(lv.centers):
            center = " ".join(f"{x:.17g}" for x in c)
            mass = float(measure.level_masses[level][i]) if measure is not None else ""
            w.writerow([level, center, f"{lv.radius:.17g}", mass])
    return buf.getvalue()


def slope_report_csv(radii: list[float], masses: list[float]) -> str:
    """CSV of the fitted log-log relation: radius, mass, residual."""
    pairs = [(r, m) for r, m in zip(radii, masses) if m > 0.0]
    slope, residuals = _fit_slope([math.log(r) for r, _ in pairs],
                                  [math.log(m) for _, m in pairs])
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["r", "mass", "log_log_residual"])
    for (r, m), res in zip(pairs, residuals):
        w.writerow([f"{r:.17g}", f"{m:.17g}", f"{res:.17g}"])
    buf.write(f"# slope,{slope:.17g}\r\n")
    return buf.getvalue()
