"""The rolling particle on the IID instance.

alpha(t) is what the particle expects to collect from the last t units of
time if it keeps rolling; 1 + beta(t) is what it gets by stopping on a
cycle pair.  Integrating the ODE shows alpha meeting 1 + beta at s* and then
growing linearly with slope lambda.  The trajectory is written to CSV for
plotting.
"""

import sys

from prophetlab import alpha_closed, alpha_numeric, alpha_one, bound_iid, s_star

lam, theta = 1.4737, 2.8224
sol = alpha_numeric(lam, theta, step=1e-4)
print(f"s* closed form {s_star(lam, theta):.6f}, first grid crossing {sol.s_star:.4f}")
print(f"alpha(1) numeric {sol.alpha_values[-1]:.10f}, closed {alpha_one(lam, theta):.10f}")
print(f"ratio alpha(1) / E[OPT] = {bound_iid(lam, theta):.6f}")

print("\n   t     alpha   1+beta   closed")
for t in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
    i = round(t / 1e-4)
    print(f"{t:4.1f}  {sol.alpha_values[i]:.5f}  {sol.one_plus_beta[i]:.5f}  {alpha_closed(t, lam, theta):.5f}")

if len(sys.argv) > 1:
    sol.to_csv(sys.argv[1])
    print(f"\ntrajectory written to {sys.argv[1]}")
