"""Random-order families: threshold algorithms, their bounds, and a simulation.

For each lambda the best two-threshold particle has a closed form.  We sweep
lambda, locate the minimizing one, and then simulate the threshold policy on
a finite instance to see the closed form hold up.
"""

import numpy as np

from prophetlab import (
    GAMMA,
    ThresholdPolicy,
    alg_secretary_matching,
    bound_secretary_2ba,
    bound_secretary_matching,
    build_secretary_matching,
    minimize_nd,
    optimal_thresholds_secretary_matching,
    simulate_policy,
)

print(" lambda   matching    2BA")
for lam in np.linspace(GAMMA, 4, 8):
    print(f"{lam:7.4f}  {bound_secretary_matching(lam):.6f}  {bound_secretary_2ba(lam):.6f}")

(lam,), v = minimize_nd(bound_secretary_matching, [(GAMMA, 5)])
th = optimal_thresholds_secretary_matching(lam)
print(f"\nmatching: min at lambda={lam:.5f}, bound {v:.6f}, thresholds s={th.s:.6f} t={th.t:.6f}")
(lam2,), v2 = minimize_nd(bound_secretary_2ba, [(1, 5)])
print(f"2BA:      min at lambda={lam2:.5f}, bound {v2:.6f}")

inst = build_secretary_matching(200, lam, mode="numeric")
est = simulate_policy(inst, ThresholdPolicy.secretary_two_stage(th.s, th.t), 10**6, seed=0)
print(f"\nsimulated ALG on m=200: {est.mean:.4f} +- {est.stderr:.4f}"
      f"  (closed form {alg_secretary_matching(th.s, th.t, lam):.4f})")
