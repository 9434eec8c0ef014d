"""Why no online algorithm beats 4/11 on a 2-bounded auction with a known order.

Three agents arrive on a 4-cycle with one diagonal.  The first bids 3 on
every cycle edge, the second bids 4 on one random cycle edge, and the last
bids 4/eps on the diagonal with probability eps.  We solve the online
problem exactly and print the decision the optimal algorithm makes for
every realization, then compare with the prophet.
"""

from fractions import Fraction

from prophetlab import build_adversarial_2ba, expected_opt_exact, optimal_online_fixed_order

for eps in (Fraction(1, 2), Fraction(1, 10), Fraction(1, 1000), Fraction(1, 10**4)):
    inst = build_adversarial_2ba(eps)
    dp = optimal_online_fixed_order(inst, keep_decisions=True)
    opt = expected_opt_exact(inst)
    print(f"eps={str(eps):>8}  ALG={dp.value}  E[OPT]={opt}  ratio={float(dp.value / opt):.6f}")

print("\nfirst-agent decision at the start (None = skip):")
inst = build_adversarial_2ba(Fraction(1, 10**4))
dp = optimal_online_fixed_order(inst, keep_decisions=True)
g = inst.graph
for (step, state, k), action in sorted(dp.decisions.items(), key=repr):
    if step == 0:
        print(f"  agent 1 takes {g.edge_name(action) if action is not None else 'nothing'}")

print(f"\nlimit eps -> 0: ALG/E[OPT] -> 4/11 = {4 / 11:.6f}")
