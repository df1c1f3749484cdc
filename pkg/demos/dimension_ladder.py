# Climb the dimension ladder: as Bob's ratio beta shrinks, the set of
# winning outcomes gets fatter, and three independent instruments agree
# on how fat.
#
#   1. the closed-form lower bound from the reply-tree densities
#   2. the measured bound from an actual tree with exact rational masses
#   3. a box-counting fit over outcomes of real verified games
#
# A classical Cantor set calibrates the third instrument.

import math

from schmidtlab import (
    GameConfig,
    LazyTree,
    Rectangle,
    box_counting_dimension,
    build_game_tree,
    cantor_sample,
    closed_form_bound,
    default_opening,
    derive_constants,
    dimension_lower_bound,
    frostman_check,
    linear_circle,
    rescale_measures,
    sample_winning_points,
)
from schmidtlab.torus import Point

sys_spec = linear_circle(2)

# Rung 1: the closed form. Lower beta means bushier reply trees and a
# bound that climbs toward the full dimension of the circle.
print("closed-form lower bound, alpha = 0.1:")
for beta in (0.2, 0.1, 0.05, 0.02, 0.01):
    print(f"  beta = {beta:<5} bound = {closed_form_bound(1, 0.1, beta):.6f}")

# Rung 2: a real tree. Exact-arithmetic masses mean the conservation and
# stability identities hold as rational equalities, and the measured
# density bound lands on the closed form.
beta = 0.01
cfg = GameConfig(alpha=0.1, beta=beta, stop_radius=1e-9)
opening = default_opening(cfg, 1)
k = derive_constants(sys_spec, 0.1, beta, opening.radius)
rect = Rectangle(Point.of(0.0), k.c)

tree = build_game_tree(sys_spec, rect, cfg, k, 2, opening)
mu = rescale_measures(tree)
eager = dimension_lower_bound(tree, 1, mu)
print(f"\neager tree, depth 2: measured {eager.measured:.6f} "
      f"vs closed form {eager.closed_form:.6f}")

# The lazy tree never materializes nodes, so depth is free and the
# density computation runs on exact per-level quantities.
lazy = LazyTree(sys_spec, rect, cfg, k, 8, opening)
print(f"lazy tree,  depth 8: measured {lazy.dimension_lower_bound().measured:.6f}")

# The same measure satisfies a mass growth bound mu(B(z,r)) <= C r^h,
# which is what turns a measure into a dimension statement.
h = 0.9 * 2.0 / 3.0
rep = frostman_check(LazyTree(sys_spec, rect, cfg, k, 6, opening),
                     h=h, C=50.0, n_points=16, seed=3)
print(f"growth bound at h = {h:.3f}: holds = {rep.passes}, "
      f"fitted slope {rep.slope:.4f}")

# Rung 3: forget trees, just play. 400 verified games against seeded
# random adversaries leave 400 outcome points; their box-counting slope
# should not fall below the tree's story.
sample = sample_winning_points(sys_spec, rect, cfg, k, count=400, seed=0)
fit = box_counting_dimension(sample)
print(f"\nbox-counting fit over {fit.n_points} winning outcomes: "
      f"{fit.dimension:.4f}")
print(f"  scales span {min(fit.scales):.2e} .. {max(fit.scales):.2e}")

# Calibration: the instrument on a set whose dimension we know cold.
cal = box_counting_dimension(cantor_sample(12))
truth = math.log(2.0) / math.log(3.0)
print(f"cantor calibration: fitted {cal.dimension:.4f}, "
      f"true log2/log3 = {truth:.4f}, error {abs(cal.dimension - truth):.4f}")
