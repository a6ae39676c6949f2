"""
Breaking the cylindrical symmetry
=================================

Add eps * sum_n [a_n cos(n phi) + b_n sin(n phi)] to the bump. To first order
in eps the amplitude shifts by eps * f_eps. For the family
a_1 = (r/alpha1) f, a_2 = (r/alpha2)^2 f (and the b counterparts) the shift
factorises as f * eps * (Z1 + i Z2), and only Z1 changes the cross section.

The harmonic angle phi is measured from the momentum transfer k - k'.
"""

# %%
import math

from geoscatter import (
    THIN_LAYER,
    GaussianBump,
    PerturbedGaussianSpec,
    ScatteringKinematics,
    perturbation_amplitude,
    perturbed_gaussian_amplitude_first_order,
    z_factors,
)
from geoscatter.perturbation import perturbation_amplitude_oracle

spec = PerturbedGaussianSpec(GaussianBump.from_eta(0.01, 1.0), alpha1=1.0, alpha2=1.0, beta1=1.0, beta2=1.0)
general = spec.to_perturbation_spec()

# %%
# Three evaluations of f_eps: the closed form (leading order in eta), the
# harmonic Bessel-integral formula, and a finite difference in eps of a
# brute-force 2D Born integral over the deformed surface.

for k, theta in ((0.8, 0.6), (1.5, math.pi / 2), (2.0, math.pi)):
    kin = ScatteringKinematics(k, theta)
    closed = perturbed_gaussian_amplitude_first_order(spec, kin, THIN_LAYER)
    radial = perturbation_amplitude(general, kin, THIN_LAYER)
    brute = perturbation_amplitude_oracle(general, kin, THIN_LAYER)
    print(f"k={k:.1f} theta={theta:.3f}  closed {closed:.6e}  radial {radial:.6e}  2D {brute:.6e}")

# %%
# Z1 in the forward direction with thin-layer couplings and alpha2 = sigma
# rises towards 2: the perturbation enhances forward scattering at high k.

for sk in (0.5, 1.0, 2.0, 4.0):
    z1, z2 = z_factors(spec, ScatteringKinematics(sk, 0.0), THIN_LAYER)
    print(f"sigma k = {sk:3.1f}: Z1 = {z1:.6f}, Z2 = {z2:.1f}")
