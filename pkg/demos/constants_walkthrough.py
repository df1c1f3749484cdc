# Walk the full constant chain for each model system and show the
# inequalities every derived value has to satisfy.
#
# The chain starts from the two game ratios (alpha, beta) and the system's
# derivative bounds and ends with the rectangle width c the strategy can
# protect. Each step is printed with its margin so you can see how much
# room the derivation leaves.

import math

from schmidtlab import (
    constants_report,
    derive_constants,
    linear_circle,
    named_system,
    sys_id,
)

for name in ("linear2", "nonlinear", "conformal2", "skew2"):
    sys_spec = named_system(name)
    k = derive_constants(sys_spec, alpha=0.1, beta=0.1, first_radius=0.25)
    print(constants_report(k, sys_id(sys_spec)))
    print()

# The counting inequality (1 - eps)^r * N < 1 is the heart of the chain:
# it says one block of r turns shrinks the surviving danger mass below a
# single component. Watch the margin.
k = derive_constants(linear_circle(2), 0.1, 0.1, 0.25)
shrink = (1.0 - k.epsilon) ** k.r * k.N
print(f"linear-circle(2): (1 - {k.epsilon})^{k.r} * {k.N} = {shrink:.4f} < 1")

# Slow-shrink games stress the same chain from the other side. With beta
# near 1 Bob gives up almost nothing per turn, so blocks are short and the
# protected width is within reach of a desk-scale game.
eng = derive_constants(linear_circle(64), alpha=0.1, beta=0.99, first_radius=0.25)
print(f"linear-circle(64) at beta=0.99: r={eng.r}, N={eng.N}, c={eng.c:.3e}")

# Small beta instead drives the dimension bound toward full: the protected
# width collapses but the tree of replies gets bushy.
slow = derive_constants(linear_circle(2), alpha=0.1, beta=0.01, first_radius=0.25)
print(f"linear-circle(2) at beta=0.01: r={slow.r}, N={slow.N}, c={slow.c:.3e}")

# The constants are derived at the radius cap, then the strategy waits for
# Bob's ball to shrink to rho before activating, so one chain covers any
# legal opening. log-scale sanity: the block geometry only references
# ratios of radii, never absolute positions.
print(f"\nactivation radius rho = {k.rho}")
print(f"block length r = {k.r} turns, window ratio (alpha*beta)^r = "
      f"{(k.alpha * k.beta) ** k.r:.3e}")
print(f"horizon per block: sizes shrink by sigma1^r = {2 ** k.r} fold")
print(f"\nworst-case danger count per block N = {k.N}, "
      f"quorum eps = {k.epsilon} dodges ceil(eps*m) of any m dangers")
print(f"distortion allowance K = {k.K} "
      f"(log slack {math.log(k.K):.2e})")
