"""Referee for the (alpha, beta) nested-ball game.

Bob and Alice alternate, Bob first. Bob's opening radius is free; after
that Alice must play radius alpha times Bob's, Bob beta times Alice's,
and every ball must sit inside the previous one. The game ends with the
first move whose radius is at or below stop_radius; the outcome is the
final center, accurate to final_radius.

The referee never trusts a strategy: every proposed ball goes through
validate_move, and an illegal proposal aborts the game loudly with the
offending move attached. Post-hoc, verify_transcript replays all
legality checks, re-derives every block's danger obligations, and runs
the orbit surrogate check at the computed horizon.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Protocol

from .errors import ScriptedExhausted, StrategyIllegalMove
from .systems import (
    Rectangle,
    SystemSpec,
    component_to_obj,
    orbit_min_distance,
    spec_from_obj,
    spec_to_obj,
)
from .torus import Ball, Point, balls_disjoint, contains_ball

RATIO_RTOL = 1e-12


@dataclass(frozen=True)
class GameConfig:
    alpha: float
    beta: float
    stop_radius: float
    first_move_policy: str = "concentric"  # Alice's waiting-phase rule
    L: float = 1.0  # local-scale knob; 1 means the whole circle (inactive)
    seed: int | None = None  # provenance only; the referee draws nothing

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if self.stop_radius < 1e-12:
            raise ValueError("stop_radius must be at least 1e-12")


@dataclass(frozen=True)
class Move:
    player: str  # "bob" | "alice"
    ball: Ball
    turn_index: int  # global, 1-based


@dataclass
class Transcript:
    config: GameConfig
    system: SystemSpec
    rectangle: Rectangle
    moves: list[Move] = field(default_factory=list)
    outcome: Point | None = None
    final_radius: float | None = None
    verification: dict | None = None

    @property
    def last_move(self) -> Move | None:
        return self.moves[-1] if self.moves else None

    @property
    def next_player(self) -> str:
        return "bob" if len(self.moves) % 2 == 0 else "alice"


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str | None = None


def expected_radius(prev: Move, config: GameConfig) -> float:
    ratio = config.alpha if prev.player == "bob" else config.beta
    return ratio * prev.ball.radius


def validate_move(prev: Move | None, nxt: Move, config: GameConfig) -> Verdict:
    """Accept iff player alternation, the exact radius ratio (relative
    tolerance 1e-12), and containment in the previous ball all hold.
    Bob's first move is free apart from the ball invariants themselves."""
    if prev is None:
        if nxt.player != "bob":
            return Verdict(False, "wrong-player")
        return Verdict(True)
    want = "alice" if prev.player == "bob" else "bob"
    if nxt.player != want:
        return Verdict(False, "wrong-player")
    expect = expected_radius(prev, config)
    if abs(nxt.ball.radius - expect) > RATIO_RTOL * expect:
        return Verdict(False, "radius-ratio")
    if not contains_ball(prev.ball, nxt.ball):
        return Verdict(False, "not-contained")
    return Verdict(True)


class Strategy(Protocol):
    def propose(self, t: Transcript) -> Ball: ...


def run_game(
    config: GameConfig,
    sys_spec: SystemSpec,
    rect: Rectangle,
    alice: Strategy,
    bob: Strategy,
) -> Transcript:
    """Play one full game. Deterministic given both strategies' seeds."""
    t = Transcript(config, sys_spec, rect)
    while True:
        player = t.next_player
        strat = bob if player == "bob" else alice
        ball = strat.propose(t)
        move = Move(player, ball, len(t.moves) + 1)
        verdict = validate_move(t.last_move, move, config)
        if not verdict.ok:
            raise StrategyIllegalMove(
                f"{player} proposed an illegal move at turn {move.turn_index}: {verdict.reason}",
                move,
            )
        t.moves.append(move)
        if ball.radius <= config.stop_radius:
            break
    t.outcome = t.moves[-1].ball.center
    t.final_radius = t.moves[-1].ball.radius
    return t


class ScriptedStrategy:
    """Replays one player's moves from a stored transcript."""

    def __init__(self, source: Transcript, player: str):
        self.player = player
        self._balls = [m.ball for m in source.moves if m.player == player]
        self._next = 0

    def propose(self, t: Transcript) -> Ball:
        if self._next >= len(self._balls):
            raise ScriptedExhausted(
                f"script exhausted: no move {self._next + 1} for {self.player}"
            )
        ball = self._balls[self._next]
        self._next += 1
        return ball


@dataclass
class VerificationReport:
    moves_ok: bool
    move_failures: list[dict]
    blocks: list[dict]
    counting_ok: bool
    max_danger_count: int
    danger_bound: int
    horizon: int
    min_orbit_distance: float
    orbit_bound: float
    orbit_ok: bool

    @property
    def blocks_ok(self) -> bool:
        return all(b["cleared"] for b in self.blocks)

    @property
    def ok(self) -> bool:
        return self.moves_ok and self.counting_ok and self.blocks_ok and self.orbit_ok

    def to_obj(self) -> dict:
        return {
            "moves_ok": self.moves_ok,
            "move_failures": self.move_failures,
            "blocks": self.blocks,
            "counting_ok": self.counting_ok,
            "max_danger_count": self.max_danger_count,
            "danger_bound": self.danger_bound,
            "horizon": self.horizon,
            "min_orbit_distance": self.min_orbit_distance,
            "orbit_bound": self.orbit_bound,
            "orbit_ok": self.orbit_ok,
            "ok": self.ok,
        }


def verify_transcript(t: Transcript, constants, sys_spec: SystemSpec, rect: Rectangle) -> VerificationReport:
    """Re-check a complete transcript from scratch.

    (a) every move is re-validated; (b) for each completed block, the
    danger components Alice was obliged to avoid are re-enumerated and
    her block-closing ball is checked disjoint from each; (c) the
    outcome's orbit is checked against the target out to the horizon
    ceil(log(c / (2 final_radius)) / log sigma1). Failures are carried
    in the report, never raised.
    """
    from .alice import danger_list  # deferred: alice builds on this module

    move_failures: list[dict] = []
    prev: Move | None = None
    for m in t.moves:
        verdict = validate_move(prev, m, t.config)
        if not verdict.ok:
            move_failures.append({"turn": m.turn_index, "reason": verdict.reason})
        prev = m

    # Activation: the first Bob ball at or below the activation radius.
    bob_balls = [m.ball for m in t.moves if m.player == "bob"]
    alice_balls = [m.ball for m in t.moves if m.player == "alice"]
    act_idx = None
    for i, b in enumerate(bob_balls):
        if b.radius <= constants.rho * (1.0 + RATIO_RTOL):
            act_idx = i
            break

    blocks: list[dict] = []
    max_count = 0
    counting_ok = True
    if act_idx is not None:
        rho_act = bob_balls[act_idx].radius
        r = constants.r
        active_bob = bob_balls[act_idx:]
        active_alice = alice_balls[act_idx:]
        j = 0
        while True:
            opener_i = j * r  # active index of Bob's ball opening block j
            closer_i = (j + 1) * r - 1  # active index of Alice's block-closing ball
            if closer_i >= len(active_alice) or opener_i >= len(active_bob):
                break
            opener = active_bob[opener_i]
            closing = active_alice[closer_i]
            try:
                dangers = danger_list(
                    sys_spec, rect, constants, j, opener, rho_act=rho_act, enforce_bound=False
                )
            except Exception as exc:  # enumeration itself failing is a report-level failure
                blocks.append({"j": j, "danger_count": -1, "cleared": False,
                               "violations": [], "error": str(exc)})
                j += 1
                continue
            max_count = max(max_count, len(dangers))
            if len(dangers) > constants.N:
                counting_ok = False
            violations = [
                component_to_obj(d) for d in dangers
                if not balls_disjoint(closing, d.hull)
            ]
            blocks.append({
                "j": j,
                "danger_count": len(dangers),
                "cleared": not violations,
                "violations": violations,
            })
            j += 1

    ratio = constants.c / (2.0 * t.final_radius)
    horizon = max(0, math.ceil(math.log(ratio) / math.log(constants.sigma1))) if ratio > 0 else 0
    min_orbit = orbit_min_distance(sys_spec, t.outcome, rect.target, horizon)
    orbit_bound = constants.c / 2.0 - t.final_radius
    return VerificationReport(
        moves_ok=not move_failures,
        move_failures=move_failures,
        blocks=blocks,
        counting_ok=counting_ok,
        max_danger_count=max_count,
        danger_bound=constants.N,
        horizon=horizon,
        min_orbit_distance=min_orbit,
        orbit_bound=orbit_bound,
        orbit_ok=min_orbit >= orbit_bound,
    )


def config_to_obj(config: GameConfig) -> dict:
    obj = {
        "alpha": config.alpha,
        "beta": config.beta,
        "stop_radius": config.stop_radius,
        "first_move_policy": config.first_move_policy,
        "L": config.L,
    }
    if config.seed is not None:
        obj["seed"] = config.seed
    return obj


def config_from_obj(obj: dict) -> GameConfig:
    return GameConfig(
        alpha=float(obj["alpha"]),
        beta=float(obj["beta"]),
        stop_radius=float(obj["stop_radius"]),
        first_move_policy=obj.get("first_move_policy", "concentric"),
        L=float(obj.get("L", 1.0)),
        seed=obj.get("seed"),
    )


def transcript_to_obj(t: Transcript) -> dict:
    obj = {
        "config": config_to_obj(t.config),
        "system": spec_to_obj(t.system),
        "rectangle": {"c": list(t.rectangle.target.coords), "w": t.rectangle.width},
        "moves": [
            {"p": m.player, "c": list(m.ball.center.coords), "r": m.ball.radius, "t": m.turn_index}
            for m in t.moves
        ],
        "outcome": list(t.outcome.coords) if t.outcome is not None else None,
        "final_radius": t.final_radius,
    }
    if t.verification is not None:
        obj["verification"] = t.verification
    return obj


def transcript_from_obj(obj: dict) -> Transcript:
    rect = Rectangle(Point.of(*obj["rectangle"]["c"]), obj["rectangle"]["w"])
    t = Transcript(
        config=config_from_obj(obj["config"]),
        system=spec_from_obj(obj["system"]),
        rectangle=rect,
        moves=[
            Move(m["p"], Ball(Point.of(*m["c"]), m["r"]), m["t"])
            for m in obj["moves"]
        ],
        outcome=Point.of(*obj["outcome"]) if obj.get("outcome") is not None else None,
        final_radius=obj.get("final_radius"),
        verification=obj.get("verification"),
    )
    return t


def transcript_json(t: Transcript) -> str:
    """Canonical byte-stable serialization: sorted keys, no whitespace."""
    return json.dumps(transcript_to_obj(t), sort_keys=True, separators=(",", ":"))


def summary_csv(rows: list[dict], provenance: str) -> str:
    """Game-batch summary: one row per game under a provenance header."""
    lines = [f"# {provenance}", "seed,winner,min_orbit_distance,length"]
    for row in rows:
        lines.append(
            f"{row['seed']},{row['winner']},{row['min_orbit_distance']:.17g},{row['length']}"
        )
    return "\n".join(lines) + "\n"
