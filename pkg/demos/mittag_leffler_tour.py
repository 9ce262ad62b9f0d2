"""
Evaluating E_{a,b}(z) on the negative axis
==========================================

Three routes cover z <= 0: the power series near the origin, the
asymptotic expansion far out and a parabolic contour integral in between.
"""

import math

import numpy as np

from switchfrac.harness import decay_supremum
from switchfrac.mittag_leffler import ml_decay_margin, ml_eval

# %% which route answers where
for z in (-0.5, -4.0, -20.0, -80.0, -1.0e3):
    r = ml_eval(1.5, 1.0, z)
    print(f"E_1.5,1({z:g}) = {r.value: .15e}  via {r.method_used:10s} err ~ {r.abs_error_estimate:.1e}")

# %% classical special cases
x = 3.0
print("cos:", ml_eval(2.0, 1.0, -x * x).value - math.cos(x))
print("sinc:", ml_eval(2.0, 2.0, -x * x).value - math.sin(x) / x)
print("exp:", ml_eval(1.0, 1.0, -x).value - math.exp(-x))

# %% the decay envelope |E(z)| (1 + |z|)
# for a > 1 the function oscillates; with 200 log-spaced samples on
# [-1e4, -1e-4] the first lobe near z = -93 is undersampled
for n in (200, 399, 1593):
    print(f"sup over {n} samples, (1.8, 0.8): {decay_supremum(1.8, 0.8, n):.6f}")
z = -np.linspace(85.0, 100.0, 301)
print("dense search near the lobe:", max(ml_decay_margin(1.8, 0.8, float(v)) for v in z))
