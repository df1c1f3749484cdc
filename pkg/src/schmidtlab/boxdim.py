"""Box-counting dimension of sampled winning points.

Samples come from games against independently seeded random Bobs rather
than from the game tree, so this estimate and the measure-theoretic
bounds do not share structure. Box counting is the standard occupied-
box slope over a scale window clear of both saturation ends: boxes
below the inter-point spacing count points, boxes near the diameter
count one.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .alice import AliceStrategy, StrategyConstants
from .bob import RandomBob
from .game import GameConfig, run_game, verify_transcript
from .systems import Rectangle, SystemSpec
from .torus import Point


@dataclass
class PointSample:
    """Deduplicated points with the seed and config that produced them."""

    u: int
    points: list[tuple[float, ...]] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    _keys: set = field(default_factory=set, repr=False)

    def add(self, p: Point) -> bool:
        if p.u != self.u:
            raise ValueError("mixed dimensions in one sample")
        key = tuple(round(x, 12) for x in p.coords)
        if key in self._keys:
            return False
        self._keys.add(key)
        self.points.append(p.coords)
        return True

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float).reshape(len(self.points), self.u)


def sample_winning_points(
    sys_spec: SystemSpec,
    rect: Rectangle,
    config: GameConfig,
    constants: StrategyConstants,
    count: int,
    seed: int,
) -> PointSample:
    """Play `count` games against fresh random Bobs and collect the
    outcome points. Every transcript is verified; a failure means the
    strategy is broken, so the whole batch aborts."""
    sample = PointSample(u=sys_spec.u, provenance={
        "seed": seed,
        "count": count,
        "system": sys_spec.kind,
        "degree": sys_spec.degree,
        "alpha": config.alpha,
        "beta": config.beta,
        "stop_radius": config.stop_radius,
        "target": list(rect.target.coords),
        "width": rect.width,
    })
    children = np.random.SeedSequence(seed).spawn(count)
    for i in range(count):
        child_seed = int(children[i].generate_state(1)[0])
        alice = AliceStrategy(sys_spec, rect, config, constants)
        bob = RandomBob(seed=child_seed)
        transcript = run_game(config, sys_spec, rect, alice, bob)
        report = verify_transcript(transcript, constants, sys_spec, rect)
        if not report.ok:
            raise RuntimeError(
                f"game {i} (seed {child_seed}) failed verification; aborting batch"
            )
        sample.add(transcript.moves[-1].ball.center)
    return sample


@dataclass(frozen=True)
class BoxCountReport:
    dimension: float
    scales: list[float]
    counts: list[int]
    residuals: list[float]
    spacing: float
    diameter: float
    saturation_scale: float
    n_points: int


def _wrap_diffs(pts: np.ndarray) -> np.ndarray:
    d = np.abs(pts[:, None, :] - pts[None, :, :])
    return np.minimum(d, 1.0 - d)


def _spacing_and_diameter(pts: np.ndarray) -> tuple[float, float]:
    """Median nearest-neighbor gap and max pairwise distance, both
    wrap-aware. Pairwise work is capped by subsampling; these feed the
    scale window, where a rough value is fine."""
    n, u = pts.shape
    cap = 2048
    if n > cap:
        idx = np.random.default_rng(0).choice(n, cap, replace=False)
        pts = pts[idx]
        n = cap
    d = _wrap_diffs(pts)
    dist = d[..., 0] if u == 1 else np.hypot(d[..., 0], d[..., 1])
    np.fill_diagonal(dist, np.inf)
    spacing = float(np.median(dist.min(axis=1)))
    diameter = float(dist[np.isfinite(dist)].max()) if n > 1 else 0.0
    return spacing, diameter


def _occupied_boxes(pts: np.ndarray, delta: float) -> int:
    cells = np.floor(pts / delta).astype(np.int64)
    return len(np.unique(cells, axis=0))


def box_counting_dimension(sample: PointSample,
                           scales: list[float] | None = None) -> BoxCountReport:
    """Least-squares slope of log N(delta) against log(1/delta).

    Without explicit scales the window is auto-selected as
    [10*spacing, diameter/10]; below the spacing the count saturates at
    the number of points, above the diameter at one box, and both ends
    bias the slope. Needs at least 100 distinct points and two decades
    of scales; a sample that collapses to a single point returns 0.
    """
    pts = sample.as_array()
    if len(pts) <= 1:
        return BoxCountReport(0.0, [], [], [], 0.0, 0.0, 0.0, len(pts))
    spacing, diameter = _spacing_and_diameter(pts)
    if len(pts) < 100:
        raise ValueError(f"insufficient points: need >= 100 distinct, got {len(pts)}")
    if scales is None:
        # auto window per the known-bias rule; its span is whatever the
        # sample affords (the two-decade floor applies to caller scales)
        lo, hi = 10.0 * spacing, diameter / 10.0
        if not lo < hi:
            raise ValueError(
                f"insufficient-scales: auto window [{lo:.3g}, {hi:.3g}] is empty; "
                "sample too small or too clustered"
            )
        scales = list(np.geomspace(lo, hi, num=16))
    else:
        scales = sorted(float(s) for s in scales)
        if scales[0] <= 0.0:
            raise ValueError("scales must be positive")
        if scales[-1] / scales[0] < 100.0 * (1.0 - 1e-9):
            raise ValueError(
                f"insufficient-scales: span {scales[-1]/scales[0]:.3g} < 2 decades"
            )
    scales = sorted(float(s) for s in scales)
    usable = [s for s in scales if s >= spacing]
    if len(usable) < 2:
        raise ValueError("insufficient-scales: all scales below point spacing")
    counts = [_occupied_boxes(pts, s) for s in usable]
    x = np.log(1.0 / np.asarray(usable))
    y = np.log(np.asarray(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    residuals = list(y - (slope * x + intercept))
    return BoxCountReport(float(slope), usable, counts, residuals,
                          spacing, diameter, spacing, len(pts))


def uniform_circle_sample(n: int) -> PointSample:
    """Evenly spaced points; full-dimensional calibration reference."""
    s = PointSample(u=1, provenance={"calibration": "uniform", "n": n})
    for i in range(n):
        s.add(Point.of(i / n))
    return s


def cantor_sample(depth: int) -> PointSample:
    """Left endpoints of the depth-`depth` middle-thirds construction,
    scaled into [0, 1); classical calibration at log 2 / log 3."""
    xs = [0.0]
    scale = 1.0
    for _ in range(depth):
        scale /= 3.0
        xs = [x for x in xs] + [x + 2.0 * scale for x in xs]
    s = PointSample(u=1, provenance={"calibration": "cantor", "depth": depth})
    for x in xs:
        s.add(Point.of(x))
    return s


def sample_to_csv(sample: PointSample) -> str:
    buf = io.StringIO()
    prov = ",".join(f"{k}={v}" for k, v in sorted(sample.provenance.items(),
                                                  key=lambda kv: kv[0]))
    buf.write(f"# provenance: {prov}\r\n")
    w = csv.writer(buf)
    w.writerow(["x"] if sample.u == 1 else ["x", "y"])
    for p in sample.points:
        w.writerow([f"{c:.17g}" for c in p])
    return buf.getvalue()


def boxcount_report_csv(report: BoxCountReport) -> str:
    buf = io.StringIO()
    buf.write(f"# dimension={report.dimension:.17g} spacing={report.spacing:.6g} "
              f"diameter={report.diameter:.6g} n_points={report.n_points}\r\n")
    w = csv.writer(buf)
    w.writerow(["scale", "boxes", "log_log_residual"])
    for s, c, r in zip(report.scales, report.counts, report.residuals):
        w.writerow([f"{s:.17g}", c, f"{r:.17g}"])
    return buf.getvalue()
