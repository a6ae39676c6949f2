"""
A 3x3 triangular lattice of bumps
=================================

For well separated identical bumps the Born amplitude is the single-bump
amplitude times the structure factor C = sum_j exp(i (k - k').c_j).
"""

# %%
import math

import numpy as np

from geoscatter import (
    THIN_LAYER,
    GaussianBump,
    ScatteringKinematics,
    composite_amplitude,
    gaussian_amplitude_first_order,
    structure_factor_lattice,
    triangular_lattice,
)

sigma = 1.0
bump = GaussianBump.from_eta(0.01, sigma)
lattice = triangular_lattice(10 * sigma)
print("centers:\n", lattice.centers)
print("diagnostics:", lattice.diagnostics(sigma, bump.eta) or "none")


def single(kin):
    return gaussian_amplitude_first_order(bump, kin, THIN_LAYER)


# %%
# |C|^2 oscillates between 0 and N^2 = 81 as k sweeps through Bragg-like
# conditions; the lattice response is that pattern times the single-bump curve.

theta = math.pi / 4
for sk in np.linspace(0.1, 1.0, 10):
    kin = ScatteringKinematics(sk, theta)
    total = composite_amplitude(lattice, single, kin.k_in, kin.k_out)
    c2 = abs(structure_factor_lattice(lattice, kin.k_in, kin.k_out)) ** 2
    print(f"sigma k = {sk:4.2f}: |C|^2 = {c2:7.3f}  |F|^2/sigma = {abs(total) ** 2 / sigma:.4e}")
