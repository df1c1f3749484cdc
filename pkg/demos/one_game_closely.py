# Play a single game against the chasing adversary and narrate what the
# strategy does at every phase: waiting, activation, block play, danger
# sightings, and the final verification.
#
# The slow-shrink configuration (degree 64, beta = 0.99) is the one where
# dangers actually surface at printable scales; the standard configs push
# c so far below the stop radius that every block is provably clean.

import json

from schmidtlab import (
    AliceStrategy,
    ChaserBob,
    GameConfig,
    Rectangle,
    derive_constants,
    linear_circle,
    run_game,
    verify_transcript,
)
from schmidtlab.game import transcript_to_obj
from schmidtlab.torus import Point

sys_spec = linear_circle(64)
config = GameConfig(alpha=0.1, beta=0.99, stop_radius=1e-12)
k = derive_constants(sys_spec, config.alpha, config.beta, 0.25)
rect = Rectangle(Point.of(0.0), k.c)

print(f"target: width-{k.c:.3e} interval at 0 on the circle")
print(f"blocks are r = {k.r} turns; danger bound N = {k.N}\n")

# The chaser knows the rectangle and steers toward surviving danger
# components; an opening radius below the cap exercises the waiting phase.
alice = AliceStrategy(sys_spec, rect, config, k)
bob = ChaserBob(sys_spec, rect, first_radius=0.017)
t = run_game(config, sys_spec, rect, alice, bob)

print(f"game over after {len(t.moves)} moves, final radius {t.final_radius:.3e}")
print(f"outcome point x = {t.outcome.coords[0]:.12f}")
print(f"dangers the strategy had to dodge (max per block): "
      f"{alice.max_danger_count}\n")

# Replay the move log with radii so the phase structure is visible. The
# strategy plays concentric until Bob's ball reaches the activation
# radius rho; after that, every r-th reply closes a block. Recompute the
# activation point from the transcript the same way the verifier does.
bob_radii = [m.ball.radius for m in t.moves if m.player == "bob"]
act = next(i for i, r_b in enumerate(bob_radii)
           if r_b <= k.rho * (1.0 + 1e-12))
alice_seen = 0
for m in t.moves:
    tag = ""
    if m.player == "bob" and m.turn_index == 2 * act + 1:
        tag = "  <- activation: windows anchor to this radius"
    if m.player == "alice":
        alice_seen += 1
        active_index = alice_seen - 1 - act
        if active_index >= 0 and (active_index + 1) % k.r == 0:
            tag = f"  <- closes block {(active_index + 1) // k.r - 1}"
    print(f"  turn {m.turn_index:3d} {m.player:5s} r={m.ball.radius:.6e}{tag}")

# Verification re-derives every obligation from the transcript alone:
# move legality, the per-block danger audit, and the orbit clearance of
# the outcome out to the horizon where preimages are wider than the
# final ball.
rep = verify_transcript(t, k, sys_spec, rect)
print(f"\nverification: ok = {rep.ok}")
for row in rep.blocks:
    print(f"  block {row['j']}: {row['danger_count']} dangers, "
          f"cleared = {row['cleared']}")
print(f"  horizon = {rep.horizon} iterates, min orbit distance "
      f"{rep.min_orbit_distance:.3e} >= bound {rep.orbit_bound:.3e}")

# Transcripts serialize losslessly; this is the same object the CLI's
# play command writes and its replay mode consumes.
blob = json.dumps(transcript_to_obj(t), sort_keys=True)
print(f"\ntranscript serializes to {len(blob)} bytes of JSON")
