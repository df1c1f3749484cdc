"""Adversary strategies for Bob.

Bob is universally quantified in every claim the engine checks, so
these are stress samples of that quantifier: a seeded uniform random
player, a chaser that enumerates preimage components of the target
rectangle (the same dangers Alice dodges) and drives its center into
the deepest one it can see, a scripted replayer, and a remote player
that blocks on a message queue and is validated move by move because
the other end is never trusted.
"""

from __future__ import annotations

import math
import queue
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .alice import danger_list, derive_constants
from .errors import ConstantsError, DepthCapExceeded, StrategyIllegalMove, StrategyTimeout
from .game import Move, ScriptedStrategy, Transcript, validate_move
from .systems import Rectangle, SystemSpec
from .torus import RADIUS_CAP, Ball, Point, contains_ball, distance, wrap, wrap_diff

DEFAULT_FIRST_RADIUS = 0.25
RNG_KIND = "numpy-PCG64"


def bob_constraints(t: Transcript) -> dict:
    """Legal envelope for the next Bob ball; the protocol frame mirrored
    by remote clients for pre-validation."""
    prev = t.last_move
    u = t.system.u
    if prev is None:
        return {"radius_exact": None, "radius_max": RADIUS_CAP,
                "center_ref": None, "center_max_distance": None, "u": u}
    q = t.config.beta * prev.ball.radius
    return {"radius_exact": q, "radius_max": RADIUS_CAP,
            "center_ref": list(prev.ball.center.coords),
            "center_max_distance": prev.ball.radius - q, "u": u}


@dataclass(frozen=True)
class BobSpec:
    """Reproducible description of an adversary. The seed is recorded so
    any game can be replayed from its transcript config."""

    kind: str                     # random | chaser | scripted | remote
    seed: int | None = None
    depth_bias: int = 2
    first_radius: float = DEFAULT_FIRST_RADIUS
    rng_kind: str = RNG_KIND


class RandomBob:
    """Uniform random center among the legal ones; first ball at a fixed
    radius with uniform center."""

    rng_kind = RNG_KIND

    def __init__(self, seed: int | None, first_radius: float = DEFAULT_FIRST_RADIUS):
        if not 0.0 < first_radius <= RADIUS_CAP:
            raise ValueError(f"first radius must lie in (0, {RADIUS_CAP}]")
        self.seed = seed
        self.first_radius = first_radius
        self.rng = np.random.default_rng(seed)

    def propose(self, t: Transcript) -> Ball:
        u = t.system.u
        prev = t.last_move
        if prev is None:
            coords = self.rng.uniform(0.0, 1.0, size=u)
            return Ball(Point.of(*coords), self.first_radius)
        if prev.player != "alice":
            raise ValueError("bob queried out of turn")
        q = t.config.beta * prev.ball.radius
        slack = prev.ball.radius - q
        if u == 1:
            off = self.rng.uniform(-slack, slack)
            x = wrap(prev.ball.center.coords[0] + off)
            return Ball(Point.of(x), q)
        theta = self.rng.uniform(0.0, 2.0 * math.pi)
        rad = slack * math.sqrt(self.rng.uniform(0.0, 1.0))
        cx, cy = prev.ball.center.coords
        return Ball(Point.of(wrap(cx + rad * math.cos(theta)),
                             wrap(cy + rad * math.sin(theta))), q)


def _toward(center: Point, goal: Point, step: float) -> Point:
    """Point at distance `step` from `center` along the shortest arc to
    `goal` (step must not exceed that distance)."""
    if center.u == 1:
        dx = wrap_diff(goal.coords[0], center.coords[0])
        return Point.of(wrap(center.coords[0] + math.copysign(step, dx)))
    dx = wrap_diff(goal.coords[0], center.coords[0])
    dy = wrap_diff(goal.coords[1], center.coords[1])
    norm = math.hypot(dx, dy)
    return Point.of(wrap(center.coords[0] + dx / norm * step),
                    wrap(center.coords[1] + dy / norm * step))


class ChaserBob:
    """Knows the target rectangle and tracks the same danger windows
    Alice does. Each move it recomputes the surviving dangers of the
    block Alice is about to play, scanning depth_bias future blocks when
    the current one is clear, and steps maximally toward the nearest
    surviving hull (the deepest on its first sighting); with no danger
    anywhere in reach it parks pressure on the rectangle itself.
    """

    probe_cap = 64.0  # max candidate estimate a block probe may cost

    def __init__(self, sys_spec: SystemSpec, rect: Rectangle, depth_bias: int = 2,
                 first_radius: float = DEFAULT_FIRST_RADIUS):
        if depth_bias < 0:
            raise ValueError("depth_bias must be nonnegative")
        self.sys = sys_spec
        self.rect = rect
        self.depth_bias = depth_bias
        self.first_radius = min(first_radius, RADIUS_CAP)
        self._consts = None      # derived lazily; False when inadmissible
        self._picked = False     # first nonempty sighting targets the deepest
        self.tracked: Ball | None = None

    def _constants(self, t: Transcript):
        if self._consts is None:
            try:
                self._consts = derive_constants(
                    self.sys, t.config.alpha, t.config.beta, t.moves[0].ball.radius
                )
            except (ConstantsError, ValueError):
                self._consts = False
        return self._consts

    def _surviving(self, t: Transcript, window: Ball):
        """Dangers of the block Alice plays next (or of one of the next
        depth_bias blocks) that still meet the current ball."""
        consts = self._constants(t)
        if not consts:
            return None
        tol = consts.rho * (1.0 + 1e-12)
        bob_radii = [m.ball.radius for m in t.moves if m.player == "bob"]
        act = next((i for i, rad in enumerate(bob_radii) if rad <= tol), None)
        if act is None:
            return None
        rho_act = bob_radii[act]
        next_active_turn = len(bob_radii) + 1 - act  # alice's reply to our move
        block = (next_active_turn - 1) // consts.r
        ab = consts.alpha * consts.beta
        for j in range(block, block + self.depth_bias + 1):
            # skip blocks whose probe would drown in candidates: a degree-d
            # map packs ~d^k preimages per unit arc (d^2k per unit area),
            # and one pressure point is all we can use anyway
            lo = consts.alpha * rho_act * ab ** ((j + 2) * consts.r - 1)
            ratio = consts.c * consts.K / lo
            if ratio >= 1.0:
                k_hi = math.log(ratio) / math.log(consts.sigma1)
                density = self.sys.sigma2 ** (k_hi * self.sys.u)
                measure = 2.0 * window.radius if self.sys.u == 1 \
                    else 4.0 * window.radius ** 2
                if measure * density > self.probe_cap:
                    continue
            try:
                comps = danger_list(self.sys, self.rect, consts, j, window,
                                    rho_act=rho_act, enforce_bound=False)
            except (DepthCapExceeded, ValueError):
                return None  # window too coarse for that far a lookahead
            if comps:
                return comps
        return None

    def propose(self, t: Transcript) -> Ball:
        u = self.sys.u
        prev = t.last_move
        if prev is None:
            opening = Point.of(*self.rect.target.coords[:u])
            return Ball(opening, self.first_radius)
        if prev.player != "alice":
            raise ValueError("bob queried out of turn")
        ball = prev.ball
        q = t.config.beta * ball.radius
        slack = ball.radius - q
        comps = self._surviving(t, ball)
        if comps:
            if not self._picked:
                hull = max(comps, key=lambda comp: comp.depth).hull
                self._picked = True
            else:
                hull = min(comps, key=lambda comp: distance(ball.center, comp.hull.center)).hull
        else:
            hull = Ball(Point.of(*self.rect.target.coords[:u]), self.rect.half)
        self.tracked = hull
        d0 = distance(ball.center, hull.center)
        step = min(d0, slack * (1.0 - 1e-12))
        if step <= 0.0:
            return Ball(ball.center, q)
        for _ in range(80):
            cand = Ball(_toward(ball.center, hull.center, step), q)
            if contains_ball(ball, cand):
                # moving toward the hull must actually close the gap
                assert distance(cand.center, hull.center) < d0
                return cand
            step *= 0.5  # rounding pushed the center out; back off
        return Ball(ball.center, q)


class RemoteBob:
    """Engine-side half of a remote player. Each turn it announces the
    move constraints, then blocks on the inbox until a legal proposal
    arrives; illegal ones get a reject verdict and another chance. Only
    accepted balls ever reach the game."""

    def __init__(self, send: Callable[[dict], None], inbox: "queue.Queue[dict]",
                 deadline: float = 30.0, max_rejects: int = 100):
        self.send = send
        self.inbox = inbox
        self.deadline = deadline
        self.max_rejects = max_rejects

    def propose(self, t: Transcript) -> Ball:
        prev = t.last_move
        u = t.system.u
        self.send({"type": "your_turn", "ball_constraints": bob_constraints(t)})
        turn = len(t.moves) + 1
        deadline_at = time.monotonic() + self.deadline
        rejects = 0
        while True:
            remaining = deadline_at - time.monotonic()
            if remaining <= 0.0:
                raise StrategyTimeout(f"remote-timeout: no legal proposal within {self.deadline:g}s")
            try:
                msg = self.inbox.get(timeout=remaining)
            except queue.Empty:
                raise StrategyTimeout(
                    f"remote-timeout: no legal proposal within {self.deadline:g}s"
                ) from None
            if not isinstance(msg, dict) or msg.get("type") != "propose":
                continue
            try:
                coords = [wrap(float(c)) for c in msg["c"]]
                if len(coords) != u:
                    raise ValueError(f"need {u} coordinates")
                ball = Ball(Point.of(*coords), float(msg["r"]))
            except (KeyError, TypeError, ValueError) as bad:
                verdict_reason = f"malformed: {bad}"
                ball = None
            if ball is not None:
                verdict = validate_move(prev, Move("bob", ball, turn), t.config)
                if verdict.ok:
                    self.send({"type": "verdict", "accept": True, "reason": ""})
                    return ball
                verdict_reason = verdict.reason
            self.send({"type": "verdict", "accept": False, "reason": verdict_reason})
            rejects += 1
            if rejects >= self.max_rejects:
                raise StrategyIllegalMove(
                    f"remote player rejected {rejects} times", None
                )


def make_bob(spec: BobSpec, sys_spec: SystemSpec, rect: Rectangle,
             source: Transcript | None = None):
    if spec.kind == "random":
        return RandomBob(spec.seed, spec.first_radius)
    if spec.kind == "chaser":
        return ChaserBob(sys_spec, rect, spec.depth_bias, spec.first_radius)
    if spec.kind == "scripted":
        if source is None:
            raise ValueError("scripted bob needs a source transcript")
        return ScriptedStrategy(source, "bob")
    raise ValueError(f"cannot build bob kind {spec.kind!r} here")


def bob_move(spec: BobSpec, state: Transcript, sys_spec: SystemSpec, rect: Rectangle,
             source: Transcript | None = None) -> Ball:
    """Stateless form: rebuild the adversary, replay its past turns from
    the transcript (the RNG stream advances identically), and return the
    move for the current turn."""
    if state.next_player != "bob":
        raise ValueError("not bob's turn")
    strat = make_bob(spec, sys_spec, rect, source)
    for i, move in enumerate(state.moves):
        if move.player == "bob":
            prefix = Transcript(state.config, state.system, state.rectangle,
                                moves=list(state.moves[:i]))
            strat.propose(prefix)
    return strat.propose(state)
