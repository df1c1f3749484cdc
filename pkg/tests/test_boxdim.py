"""Winning-point sampling and box-counting slopes."""

import numpy as np
import pytest

from schmidtlab.alice import derive_constants
from schmidtlab.boxdim import (
    PointSample,
    box_counting_dimension,
    boxcount_report_csv,
    cantor_sample,
    sample_to_csv,
    sample_winning_points,
    uniform_circle_sample,
)
from schmidtlab.game import GameConfig
from schmidtlab.systems import Rectangle, linear_circle
from schmidtlab.torus import Point


def winning_sample(count, beta=0.01, seed=0):
    sys = linear_circle(2)
    cfg = GameConfig(alpha=0.1, beta=beta, stop_radius=1e-9, seed=seed)
    k = derive_constants(sys, 0.1, beta, 0.25)
    rect = Rectangle(Point.of(0.0), k.c)
    return sample_winning_points(sys, rect, cfg, k, count, seed)


def test_sample_dedup_and_provenance():
    s = PointSample(u=1, provenance={"source": "unit"})
    s.add(Point.of(0.5))
    s.add(Point.of(0.5 + 1e-13))  # same to 12 decimals
    s.add(Point.of(0.25))
    assert len(s.points) == 2
    assert s.provenance["source"] == "unit"


def test_zero_count_is_empty():
    s = winning_sample(0)
    assert s.points == []


def test_fixed_seed_reproducible():
    a = winning_sample(30, seed=11)
    b = winning_sample(30, seed=11)
    assert a.points == b.points
    c = winning_sample(30, seed=12)
    assert c.points != a.points


def test_uniform_sample_slope_near_one():
    rep = box_counting_dimension(uniform_circle_sample(1000))
    assert rep.dimension == pytest.approx(1.0, abs=0.05)


def test_single_point_slope_zero():
    s = PointSample(u=1, provenance={})
    for _ in range(200):
        s.add(Point.of(0.123456))
    rep = box_counting_dimension(s)
    assert rep.dimension == 0.0


def test_insufficient_points_rejected():
    s = PointSample(u=1, provenance={})
    for i in range(40):
        s.add(Point.of(i / 40))
    with pytest.raises(ValueError, match="insufficient"):
        box_counting_dimension(s)


def test_cantor_slope():
    rep = box_counting_dimension(cantor_sample(12))
    want = np.log(2) / np.log(3)
    assert rep.dimension == pytest.approx(want, abs=0.03)


def test_explicit_scales_must_span_decades():
    s = uniform_circle_sample(500)
    with pytest.raises(ValueError, match="insufficient-scales"):
        box_counting_dimension(s, scales=[0.01, 0.02, 0.05])
    rep = box_counting_dimension(s, scales=list(np.geomspace(1e-4, 0.05, 12)))
    assert rep.dimension == pytest.approx(1.0, abs=0.1)


def test_winning_points_slope_beats_closed_form_margin():
    s = winning_sample(400)
    rep = box_counting_dimension(s)
    closed = 2.0 / 3.0
    assert rep.dimension >= closed - 0.1
    assert rep.n_points == pytest.approx(400, abs=5)  # rare dedup collisions


def test_sample_csv_carries_provenance():
    s = winning_sample(5)
    text = sample_to_csv(s)
    head = text.splitlines()[0]
    assert head.startswith("# provenance:")
    assert "seed=0" in head and "beta=0.01" in head


def test_report_csv_shape():
    rep = box_counting_dimension(uniform_circle_sample(300))
    lines = boxcount_report_csv(rep).strip().splitlines()
    assert lines[0].startswith("# dimension=")
    assert lines[1] == "scale,boxes,log_log_residual"
    assert len(lines) == 2 + len(rep.scales)
