"""The single-minded (matching) bound comes from maximizing a polynomial.

On the nine-agent instance the online optimum is exactly 1 for every
feasible (p, q), while the expected offline optimum tends to F(p, q) as the
jackpot probability shrinks.  So the bound is 1 / max F.
"""

from fractions import Fraction

from prophetlab import F_polynomial, build_prophet_matching, expected_opt_exact, maximize_F, optimal_online_fixed_order

p, q, F_star = maximize_F()
print(f"argmax F = ({p:.6f}, {q:.6f}),  F* = {F_star:.8f},  1/F* = {1 / F_star:.6f}")

reported = (0.299130, 0.364352)
print(f"F at the reported point {reported}: {F_polynomial(*reported):.8f}"
      f"  (1/F = {1 / F_polynomial(*reported):.6f})")

# the finite-eps optimum interpolates between 1 and F
for eps in (Fraction(1, 10), Fraction(1, 100), Fraction(1, 10**4)):
    inst = build_prophet_matching(*reported, eps)
    alg = optimal_online_fixed_order(inst).value
    opt = expected_opt_exact(inst)
    print(f"eps={str(eps):>7}: ALG={alg}  E[OPT]={float(opt):.6f}  ratio={float(alg / opt):.6f}")
