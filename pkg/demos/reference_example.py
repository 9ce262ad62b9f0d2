"""
Single-mode reference example
=============================

phi = psi = sin(pi x), no forcing, a = 0.5, xi = 0.75, b = 1. For each pair
of orders the snapshot fixes C_1, continuity fixes B_1 and the flux relation
gives the velocity mismatch h_1.
"""

import numpy as np

from switchfrac.harness import TABLE1_REFERENCE, run_table1, solve_example

# recompute the six tabulated quantities and compare with the reference rows
cmp = run_table1()
print(cmp.format())
print()

# the recovered solution for one pair of orders
res = solve_example(1.5, 0.5)
sol = res.solution
cfg = sol.config
print(f"alpha={cfg.alpha} beta={cfg.beta}: h(x) = {res.h[1]:.6f} sin(pi x)")

# trace at x = 1/2: wave-like before the switch, diffusive after it
t = np.array([0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0])
for ti, ui in zip(t, sol.evaluate(t, [0.5])[:, 0]):
    print(f"  t={ti:4.2f}  u(t, 1/2) = {ui: .6f}")

# guard values for every reference pair
for alpha, beta, *_ in TABLE1_REFERENCE:
    g = solve_example(alpha, beta).report["guards"][0]
    print(f"alpha={alpha} beta={beta}: E_alpha2 = {g['E_alpha2']:.5f} (threshold {g['threshold']:.1e})")
