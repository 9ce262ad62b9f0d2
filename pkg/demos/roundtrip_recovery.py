"""
Direct solve followed by recovery
=================================

Generate a snapshot psi from known data with the direct solver, then feed it
to both recovery problems and compare with what went in.
"""

import numpy as np

from switchfrac import (
    Forcing,
    InverseInput,
    ProblemConfig,
    SineSeries,
    solve_direct,
    solve_problem1,
    solve_problem2,
)
from switchfrac.forward import velocity_matched_B

cfg = ProblemConfig(alpha=1.25, beta=0.5, a=0.5, b=1.0, xi=0.75, K=8)
rng = np.random.default_rng(42)
k = np.arange(1, cfg.K + 1)
phi = SineSeries(rng.choice([-1.0, 1.0], cfg.K) / k**3)
B = SineSeries(rng.choice([-1.0, 1.0], cfg.K) / k**3)

# f(t, x) = exp(-t) sin(2 pi x) only drives mode 2
forcing = Forcing({2: lambda t: np.exp(-t)})

# %% velocity mismatch
direct = solve_direct(cfg, phi, B, forcing)
res = solve_problem1(InverseInput(cfg, phi, direct.psi, forcing))
B_rec = np.array([c.B_k for c in res.solution.coefficients])
print("velocity mismatch")
print("  max |h - h_true| =", np.max(np.abs(res.h.coeffs - direct.induced_h.coeffs)))
print("  max |B - B_true| =", np.max(np.abs(B_rec - B.coeffs)))
print("  residuals:", {k: v for k, v in res.report["residuals"].items() if k.endswith("max")})

# %% position jump
# choose B so the flux relation holds exactly, then inject a jump
jump = SineSeries.single(2, 0.3, K=cfg.K)
B2 = velocity_matched_B(cfg, phi, jump, forcing)
direct = solve_direct(cfg, phi, B2, forcing, jump=jump)
res = solve_problem2(InverseInput(cfg, phi, direct.psi, forcing))
print("position jump")
print("  recovered hbar_k:", np.round(res.hbar.coeffs, 12))

# %% truncation indicators beyond K/2
t = res.report["truncation"]
print("truncation tails beyond K =", t["K_used"])
for name in ("lemma1_tail", "lemma2_tail", "lemma4_tail"):
    print(f"  {name}: {t[name]:.3e}")
