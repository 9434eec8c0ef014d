"""Exact random-order optimum on the matching family as m grows.

Unlikely agents are interchangeable, so the DP only tracks how many of them
are still to come.  The exact ratio drifts down toward the limit bound.
"""

from prophetlab import build_secretary_matching, expected_opt_exact, optimal_online_random_order
from prophetlab.offline import expected_opt_finite_secretary

lam = 2.27861
for m in (2, 4, 6, 8):
    inst = build_secretary_matching(m, lam)
    ratio = optimal_online_random_order(inst).value / expected_opt_exact(inst, exchangeable=True)
    print(f"m={m:3d}  exact ratio {float(ratio):.6f}  ({ratio.denominator.bit_length()}-bit denominator)")
for m in (20, 50, 100):
    inst = build_secretary_matching(m, lam, mode="numeric")
    ratio = optimal_online_random_order(inst).value / expected_opt_finite_secretary("secretary_matching", m, lam)
    print(f"m={m:3d}  ratio {ratio:.6f}")
print("limit 0.671355")
