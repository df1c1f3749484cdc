"""Alice's constructive winning strategy.

The strategy plays in blocks of r consecutive Alice turns. At each
block start it enumerates the danger components whose size falls in
that block's geometric window and which meet Bob's opening ball; the
derived bound N caps how many there can be. Each turn Alice places her
ball to dodge at least ceil(epsilon * m) of the m survivors, so after r
turns of shrinking by the factor (1 - epsilon) the block's dangers are
all cleared: (1 - epsilon)^r * N < 1.

Constant derivation is pure and emits a report; the per-game strategy
object owns the mutable block state. A countable family of targets is
handled by interleaving: Alice's turn k serves target t when
k = 2^(t-1) (mod 2^t), and each target's sub-strategy sees a slower
effective game with ratio beta_t = beta * (alpha*beta)^(2^t - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AvoidInfeasible,
    BlockClaimViolation,
    ConstantsError,
    CountingViolation,
)
from .game import GameConfig, Transcript
from .systems import (
    DEPTH_CAP,
    PreimageComponent,
    Rectangle,
    SystemSpec,
    distortion_constant,
    preimage_components,
)
from .errors import DepthCapExceeded
from .torus import RADIUS_CAP, Ball, Point, balls_disjoint

R_SEARCH_CAP = 10_000
ETA_DEFAULT = 0.01


def playground_constants(u: int) -> tuple[float, float]:
    """Power-law constants (C, D) of the flat torus playground."""
    if u == 1:
        return 1.0, 2.0
    if u == 2:
        return 1.0, 4.0
    raise ValueError("playground dimension must be 1 or 2")


def winning_alpha_bound(C: float, D: float, u: int) -> float:
    """Open upper bound on alpha below which the strategy wins."""
    if C <= 0 or D <= 0:
        raise ValueError("C and D must be positive")
    return 0.5 * (1.0 / (C * D)) ** (1.0 / u)


@dataclass(frozen=True)
class StrategyConstants:
    alpha: float
    beta: float
    C: float
    D: float
    epsilon: float      # guaranteed avoidable fraction per turn
    r: int              # block length in Alice turns
    N: int              # danger bound per block
    rho0: float         # power-law radius of the playground
    rho: float          # activation radius
    c_prime: float      # outer rectangle width (single-component scale)
    c: float            # inner rectangle width (the game target's width)
    K: float            # distortion constant at c_prime
    eta: float          # distortion slack: K <= 1 + eta
    sigma1: float       # expansion lower bound of the system

    @property
    def shrink_product(self) -> float:
        return (1.0 - self.epsilon) ** self.r * self.N


def _danger_bound(r: int, alpha: float, beta: float, K: float, sigma1: float) -> int:
    return int(math.floor((math.log(K) + r * math.log(1.0 / (alpha * beta))) / math.log(sigma1))) + 3


def derive_constants(
    sys_spec: SystemSpec,
    alpha: float,
    beta: float,
    first_radius: float,
    L: float = 1.0,
    eta: float = ETA_DEFAULT,
) -> StrategyConstants:
    """Derive all strategy constants for one system and one (alpha, beta).

    epsilon comes from the playground power law; r is the smallest block
    length whose shrink product drops below 1; c_prime is the largest
    halving of 1/(4*degree) keeping distortion within 1 + eta; c sits a
    0.9 safety factor under both of its upper bounds. rho is the
    activation radius min(rho0, first_radius); an explicit local scale
    L < 1 additionally caps it at L/100.
    """
    u = sys_spec.u
    C, D = playground_constants(u)
    bound = winning_alpha_bound(C, D, u)
    epsilon = 1.0 / D - C * (2.0 * alpha) ** u
    if not 0.0 < alpha < bound or epsilon <= 0.0:
        raise ConstantsError(
            "no-admissible-r",
            f"alpha = {alpha} admits no winning constants: need 0 < alpha < {bound:g} "
            f"(avoidable fraction 1/D - C(2 alpha)^u = {epsilon:g} must be positive)",
        )
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    if not 0.0 < first_radius <= RADIUS_CAP:
        raise ValueError(f"first radius must lie in (0, {RADIUS_CAP}]")

    c_prime = 1.0 / (4.0 * sys_spec.degree)
    for _ in range(200):
        if distortion_constant(sys_spec, c_prime) <= 1.0 + eta:
            break
        c_prime *= 0.5
    else:
        raise ConstantsError("no-admissible-r", "distortion never settles below 1 + eta")
    K = distortion_constant(sys_spec, c_prime)

    r = None
    for cand in range(1, R_SEARCH_CAP + 1):
        n_cand = _danger_bound(cand, alpha, beta, K, sys_spec.sigma1)
        if (1.0 - epsilon) ** cand * n_cand < 1.0:
            r = cand
            break
    if r is None:
        raise ConstantsError(
            "no-admissible-r",
            f"no block length up to {R_SEARCH_CAP} shrinks the danger bound below 1 "
            f"(alpha too close to the bound {bound:g})",
        )
    N = _danger_bound(r, alpha, beta, K, sys_spec.sigma1)

    rho0 = RADIUS_CAP
    rho = min(rho0, first_radius)
    if L < 1.0:
        rho = min(rho, L / 100.0)

    ab = alpha * beta
    c_ec = alpha * c_prime * ab ** (2 * r - 1) / (100.0 * K)
    c_j0 = alpha * rho * ab ** (2 * r - 1)
    c = 0.9 * min(c_ec, c_j0)
    if c <= 0.0:
        raise ConstantsError("no-admissible-r", "target width underflowed to zero")
    return StrategyConstants(
        alpha=alpha, beta=beta, C=C, D=D, epsilon=epsilon, r=r, N=N,
        rho0=rho0, rho=rho, c_prime=c_prime, c=c, K=K, eta=eta,
        sigma1=sys_spec.sigma1,
    )


def constants_to_obj(k: StrategyConstants) -> dict:
    return {
        "alpha": k.alpha, "beta": k.beta, "C": k.C, "D": k.D,
        "epsilon": k.epsilon, "r": k.r, "N": k.N,
        "rho0": k.rho0, "rho": k.rho, "c_prime": k.c_prime, "c": k.c,
        "K": k.K, "eta": k.eta, "sigma1": k.sigma1,
        "checks": {
            "alpha_bound": winning_alpha_bound(k.C, k.D, 1 if k.D == 2.0 else 2),
            "shrink_product": k.shrink_product,
            "c_over_ec_bound": k.c / (k.alpha * k.c_prime * (k.alpha * k.beta) ** (2 * k.r - 1) / (100.0 * k.K)),
            "c_over_j0_bound": k.c / (k.alpha * k.rho * (k.alpha * k.beta) ** (2 * k.r - 1)),
        },
    }


def constants_report(k: StrategyConstants, sys_name: str = "") -> str:
    u = 1 if k.D == 2.0 else 2
    bound = winning_alpha_bound(k.C, k.D, u)
    lines = [
        f"winning-strategy constants{f' for {sys_name}' if sys_name else ''}",
        f"  alpha = {k.alpha:g}   (admissible: 0 < alpha < {bound:g})",
        f"  beta  = {k.beta:g}",
        f"  C = {k.C:g}, D = {k.D:g}   (flat-torus playground, u = {u})",
        f"  epsilon = 1/D - C*(2 alpha)^u = {k.epsilon:g}",
        f"  r = {k.r}   (smallest block length with (1-epsilon)^r * N(r) < 1)",
        f"  N = {k.N}   ((1-epsilon)^r * N = {k.shrink_product:g} < 1)",
        f"  rho0 = {k.rho0:g}",
        f"  rho = {k.rho:g}   (activation radius: min of rho0 and the first radius)",
        f"  c_prime = {k.c_prime:g}   (largest halving of 1/(4 degree) with K <= 1 + eta)",
        f"  K = {k.K:.6g}   (eta = {k.eta:g})",
        f"  c = {k.c:.6g}   (0.9 safety factor under both width bounds)",
    ]
    return "\n".join(lines)


def danger_list(
    sys_spec: SystemSpec,
    rect: Rectangle,
    constants: StrategyConstants,
    block_j: int,
    bob_ball: Ball,
    rho_act: float | None = None,
    enforce_bound: bool = True,
) -> list[PreimageComponent]:
    """Danger components of block j: preimage components whose size lies
    in [alpha rho (ab)^((j+2)r-1), alpha rho (ab)^((j+1)r-1)) and which
    meet Bob's opening ball (enlarged in the conformal case). Count is
    asserted against N; a violation is a refutation event carrying full
    state.
    """
    rho = constants.rho if rho_act is None else rho_act
    ab = constants.alpha * constants.beta
    r = constants.r
    lo = constants.alpha * rho * ab ** ((block_j + 2) * r - 1)
    hi = constants.alpha * rho * ab ** ((block_j + 1) * r - 1)
    window = bob_ball
    if sys_spec.u == 2:
        grow = 1.0 + 2.0 * constants.alpha * ab ** (r - 1)
        window = Ball(bob_ball.center, min(RADIUS_CAP, bob_ball.radius * grow))
    out: list[PreimageComponent] = []
    # depth-k component sizes all lie in [c/(K sigma2^k), c K/sigma1^k],
    # so only the depth band meeting [lo, hi) needs enumeration
    depth = 0
    while constants.c * constants.K / constants.sigma1 ** depth >= lo:
        if depth > DEPTH_CAP:
            raise DepthCapExceeded(
                f"block {block_j} needs preimage depth {depth} beyond the cap {DEPTH_CAP}"
            )
        if constants.c / (constants.K * sys_spec.sigma2 ** depth) < hi:
            for comp in preimage_components(sys_spec, rect, depth, window):
                if lo <= comp.size < hi:
                    out.append(comp)
        depth += 1
    out.sort(key=lambda comp: (comp.depth, comp.hull.center.coords))
    if enforce_bound and len(out) > constants.N:
        raise CountingViolation(
            f"block {block_j} produced {len(out)} dangers, above the bound {constants.N}",
            state={
                "block": block_j,
                "count": len(out),
                "bound": constants.N,
                "bob_ball": {"c": list(bob_ball.center.coords), "r": bob_ball.radius},
                "window_lo": lo,
                "window_hi": hi,
                "depth_top": depth,
                "rho_act": rho,
            },
        )
    return out


def _avoid_candidates_1d(center: float, span: float, step: float) -> np.ndarray:
    n = int(math.floor(2.0 * span / step + 1e-9))
    offsets = np.clip(-span + np.arange(n + 1) * step, -span, span)
    return (center + offsets) % 1.0


def avoid_move(current: Ball, dangers: list[Ball], alpha: float) -> Ball:
    """Alice's placement: the ball of radius alpha * current.radius inside
    `current` that avoids the most danger balls among grid candidates
    (ties to the lexicographically smallest center). Grid resolution
    starts at alpha * radius / 8 and doubles up to 4 times if the
    guaranteed avoidance count ceil(epsilon * m) is not yet met.
    """
    q = alpha * current.radius
    if not dangers:
        return Ball(current.center, q)
    u = current.u
    _, D = playground_constants(u)
    epsilon = 1.0 / D - 1.0 * (2.0 * alpha) ** u
    m = len(dangers)
    need = math.ceil(epsilon * m)
    # centers live in [0, 1), so wrapping center + offset costs up to one
    # absolute ulp; shave the span so boundary candidates stay contained
    span = current.radius - q - 4.0 * math.ulp(1.0)
    if span < 0.0:
        span = 0.0
    d_centers = np.array([d.center.coords for d in dangers])  # (m, u)
    d_radii = np.array([d.radius for d in dangers])

    step = q / 8.0
    for _ in range(5):
        if u == 1:
            xs = _avoid_candidates_1d(current.center.coords[0], span, step)
            cand = xs[:, None]  # (n, 1)
        else:
            cx, cy = current.center.coords
            n = int(math.floor(2.0 * span / step + 1e-9))
            offs = np.clip(-span + np.arange(n + 1) * step, -span, span)
            ox, oy = np.meshgrid(offs, offs, indexing="ij")
            keep = np.hypot(ox, oy) <= span
            cand = np.column_stack([((cx + ox[keep]) % 1.0), ((cy + oy[keep]) % 1.0)])
        diff = np.abs(cand[:, None, :] - d_centers[None, :, :])
        diff = np.minimum(diff, 1.0 - diff)
        dist = diff[:, :, 0] if u == 1 else np.hypot(diff[:, :, 0], diff[:, :, 1])
        avoided = (dist >= (q + d_radii)[None, :]).sum(axis=1)
        best = int(np.argmax(avoided))
        if int(avoided[best]) >= need:
            coords = cand[best]
            return Ball(Point.of(*coords), q)
        step *= 0.5
    raise AvoidInfeasible(
        f"no grid candidate avoids {need} of {m} dangers after 4 refinements"
    )


class AliceStrategy:
    """Per-game instance of the winning strategy. Owns the waiting-phase
    flag, the activation radius, and the current block's surviving
    dangers; instantiate one per game."""

    def __init__(self, sys_spec: SystemSpec, rect: Rectangle, config: GameConfig,
                 constants: StrategyConstants):
        if rect.width > constants.c * (1.0 + 1e-12):
            raise ValueError("rectangle is wider than the derived target width c")
        self.sys = sys_spec
        self.rect = rect
        self.config = config
        self.constants = constants
        self.active = False
        self.rho_act: float | None = None
        self.active_turn = 0  # Alice turns played since activation
        self.survivors: list[PreimageComponent] = []
        self.max_danger_count = 0

    def propose(self, t: Transcript) -> Ball:
        prev = t.last_move
        if prev is None or prev.player != "bob":
            raise ValueError("alice queried out of turn")
        bob_ball = prev.ball
        q = self.constants.alpha * bob_ball.radius
        if not self.active:
            if bob_ball.radius <= self.constants.rho * (1.0 + 1e-12):
                self.active = True
                self.rho_act = bob_ball.radius
            else:
                return Ball(bob_ball.center, q)  # waiting phase
        self.active_turn += 1
        r = self.constants.r
        block_j = (self.active_turn - 1) // r
        pos = (self.active_turn - 1) % r
        if pos == 0:
            self.survivors = danger_list(
                self.sys, self.rect, self.constants, block_j, bob_ball,
                rho_act=self.rho_act,
            )
            self.max_danger_count = max(self.max_danger_count, len(self.survivors))
        m = len(self.survivors)
        enlarged = [Ball(d.hull.center, q) for d in self.survivors]
        ball = avoid_move(bob_ball, enlarged, self.constants.alpha)
        still = [
            d for d, e in zip(self.survivors, enlarged)
            if not balls_disjoint(ball, e)
        ]
        if m and len(still) > m - math.ceil(self.constants.epsilon * m):
            raise BlockClaimViolation(
                f"turn shrank dangers {m} -> {len(still)}, less than the required "
                f"{math.ceil(self.constants.epsilon * m)}"
            )
        self.survivors = still
        if pos == r - 1 and self.survivors:
            raise BlockClaimViolation(
                f"block {block_j} closed with {len(self.survivors)} dangers unavoided"
            )
        return ball


def alice_move(t: Transcript, constants: StrategyConstants, sys_spec: SystemSpec,
               rect: Rectangle) -> Ball:
    """Stateless form: replay the strategy over the transcript and return
    the move for the current (Alice) turn."""
    if t.next_player != "alice":
        raise ValueError("not alice's turn")
    strat = AliceStrategy(sys_spec, rect, t.config, constants)
    ball: Ball | None = None
    for i, move in enumerate(t.moves):
        if move.player == "bob":
            prefix = Transcript(t.config, t.system, t.rectangle, moves=list(t.moves[: i + 1]))
            ball = strat.propose(prefix)
    assert ball is not None
    return ball


def interleave_target(alice_turn: int) -> int:
    """Target index t served at Alice's turn k: k = 2^(t-1) (mod 2^t)."""
    if alice_turn < 1:
        raise ValueError("turn indices are 1-based")
    return (alice_turn & -alice_turn).bit_length()


def interleave_beta(alpha: float, beta: float, t: int) -> float:
    """Effective Bob ratio seen by target t's sub-strategy."""
    return beta * (alpha * beta) ** (2 ** t - 1)


class InterleavedAlice:
    """Serves finitely many targets in one game by turn multiplexing.

    Target t gets every 2^t-th Alice turn starting at turn 2^(t-1); its
    sub-strategy sees an effective game with Bob ratio beta_t. Turns
    whose scheduled target exceeds the list play concentric. Dispatch
    decisions are logged for audit. Constants may be supplied per
    target; missing ones are derived at the target's first scheduled
    turn from the ball radius actually seen there.
    """

    def __init__(self, sys_spec: SystemSpec, targets: list[Rectangle], config: GameConfig,
                 per_constants: list[StrategyConstants | None] | None = None):
        if per_constants is not None and len(per_constants) != len(targets):
            raise ValueError("need one constants entry per target")
        self.sys = sys_spec
        self.targets = targets
        self.config = config
        self.sub_constants: list[StrategyConstants | None] = (
            list(per_constants) if per_constants is not None else [None] * len(targets)
        )
        self.subs: list[AliceStrategy | None] = [None] * len(targets)
        self.alice_turn = 0
        self.dispatch_log: list[tuple[int, int]] = []  # (alice turn, target or 0)

    def propose(self, t: Transcript) -> Ball:
        prev = t.last_move
        if prev is None or prev.player != "bob":
            raise ValueError("alice queried out of turn")
        self.alice_turn += 1
        k = self.alice_turn
        target_t = interleave_target(k)
        if target_t > len(self.targets):
            self.dispatch_log.append((k, 0))
            bob_ball = prev.ball
            return Ball(bob_ball.center, self.config.alpha * bob_ball.radius)
        self.dispatch_log.append((k, target_t))
        idx = target_t - 1
        if self.subs[idx] is None:
            consts = self.sub_constants[idx]
            if consts is None:
                beta_t = interleave_beta(self.config.alpha, self.config.beta, target_t)
                consts = derive_constants(self.sys, self.config.alpha, beta_t,
                                          prev.ball.radius)
                self.sub_constants[idx] = consts
            sub_config = GameConfig(
                alpha=self.config.alpha, beta=consts.beta,
                stop_radius=self.config.stop_radius,
                first_move_policy=self.config.first_move_policy,
                L=self.config.L,
            )
            self.subs[idx] = AliceStrategy(self.sys, self.targets[idx], sub_config, consts)
        sub = self.subs[idx]
        stub = Transcript(t.config, t.system, self.targets[idx], moves=[prev])
        return sub.propose(stub)


def interleaved_strategy(sys_spec: SystemSpec, targets: list[Rectangle],
                         config: GameConfig,
                         per_constants: list[StrategyConstants | None] | None = None,
                         ) -> InterleavedAlice:
    return InterleavedAlice(sys_spec, targets, config, per_constants)


@dataclass
class InterleavedReport:
    """Verification of a multi-target game: move legality, the turn
    multiplexing schedule, and each target's orbit clearance at its own
    horizon and width."""

    moves_ok: bool
    move_failures: list[dict]
    schedule_ok: bool
    schedule_failures: list[dict]
    targets: list[dict]

    @property
    def ok(self) -> bool:
        return (self.moves_ok and self.schedule_ok
                and all(row["ok"] for row in self.targets))

    def to_obj(self) -> dict:
        return {
            "ok": self.ok,
            "moves_ok": self.moves_ok,
            "move_failures": self.move_failures,
            "schedule_ok": self.schedule_ok,
            "schedule_failures": self.schedule_failures,
            "targets": self.targets,
        }


def verify_interleaved(t: Transcript, targets: list[Rectangle],
                       per_constants: list[StrategyConstants],
                       dispatch_log: list[tuple[int, int]],
                       sys_spec: SystemSpec) -> InterleavedReport:
    """Re-validate a finished multi-target game.

    Schedule correctness means Alice turn k served target
    lowest-set-bit(k) (equivalently k = 2^(t-1) mod 2^t), or no target
    when that index runs past the list. Orbit clearance is checked per
    target with that target's own width.
    """
    from .game import validate_move
    from .systems import orbit_min_distance

    move_failures = []
    prev = None
    for move in t.moves:
        verdict = validate_move(prev, move, t.config)
        if not verdict.ok:
            move_failures.append({"turn": move.turn_index, "reason": verdict.reason})
        prev = move

    schedule_failures = []
    for k, served in dispatch_log:
        want = interleave_target(k)
        if want > len(targets):
            want = 0
        if served != want:
            schedule_failures.append({"alice_turn": k, "served": served, "want": want})

    rows = []
    final_radius = t.moves[-1].ball.radius if t.moves else None
    outcome = t.moves[-1].ball.center if t.moves else None
    for rect, consts in zip(targets, per_constants):
        c = consts.c
        horizon = 0
        if final_radius is not None and c > 2.0 * final_radius:
            horizon = max(0, math.ceil(math.log(c / (2.0 * final_radius))
                                       / math.log(consts.sigma1)))
        bound = c / 2.0 - (final_radius if final_radius is not None else 0.0)
        dist = (orbit_min_distance(sys_spec, outcome, rect.target, horizon)
                if outcome is not None else math.inf)
        rows.append({
            "target": list(rect.target.coords),
            "width": rect.width,
            "horizon": horizon,
            "orbit_bound": bound,
            "min_orbit_distance": dist,
            "ok": dist >= bound,
        })
    return InterleavedReport(not move_failures, move_failures,
                             not schedule_failures, schedule_failures, rows)
