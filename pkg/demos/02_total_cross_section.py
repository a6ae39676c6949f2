"""
Total cross section and the choice of couplings
===============================================

The angular integral of |f|^2 for the Gaussian bump has a closed form in
modified Bessel functions. We tabulate it for four coupling pairs and
check one value against direct integration over the angle.
"""

# %%
import numpy as np

from geoscatter import (
    CurvatureCouplings,
    GaussianBump,
    ScatteringKinematics,
    gaussian_amplitude_first_order,
    gaussian_total_cross_section,
    total_cross_section_numeric,
)

bump = GaussianBump.from_eta(0.1, 1.0)
pairs = [(0.5, -0.5), (0.5, 0.5), (0.5, 0.0), (0.0, -0.5)]
sk = np.array([0.25, 0.5, 1.0, 2.0, 3.0, 4.0])

print("sigma k   " + "  ".join(f"({a:+.1f},{b:+.1f})" for a, b in pairs))
table = [gaussian_total_cross_section(bump, sk, CurvatureCouplings(a, b)) for a, b in pairs]
for i, x in enumerate(sk):
    print(f"{x:7.2f}   " + "  ".join(f"{col[i]:11.4e}" for col in table))

# %%
# Without a lambda2 term the cross section stays finite as k -> 0; any
# nonzero lambda2 gives the 1/k growth of the 2D Born amplitude.

c = CurvatureCouplings(0.5, -0.5)
k = 1.7
numeric = total_cross_section_numeric(lambda t: gaussian_amplitude_first_order(bump, ScatteringKinematics(k, t), c))
closed = gaussian_total_cross_section(bump, k, c)
print(f"closed form {closed:.15e}")
print(f"quadrature  {numeric:.15e}")
