"""Surfaces made of well-separated, locally cylindrically symmetric bumps.

In first Born approximation the amplitude of a superposition is the sum of
the single-bump amplitudes, each multiplied by the translation phase
exp(i (k - k').c_j). For identical bumps the phases collect into the
structure factor C(k', k).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .born import ScatteringKinematics, check_elastic
from .exceptions import DomainError
from .geometry import GraphSurface, RadialProfile, radial_graph_surface, sum_graph_surfaces

SEPARATION_RATIO = 5.0
ETA_GUARD = 0.1
DEGENERATE_WINDOW = 1e-9


@dataclass(frozen=True)
class LatticeSpec:
    """Finite lattice of centers m a + n b, m in [m1, m2], n in [n1, n2]."""

    a_vec: tuple
    b_vec: tuple
    m_range: tuple = (0, 0)
    n_range: tuple = (0, 0)

    def __post_init__(self):
        object.__setattr__(self, "a_vec", tuple(float(v) for v in self.a_vec))
        object.__setattr__(self, "b_vec", tuple(float(v) for v in self.b_vec))
        object.__setattr__(self, "m_range", tuple(int(v) for v in self.m_range))
        object.__setattr__(self, "n_range", tuple(int(v) for v in self.n_range))
        if len(self.a_vec) != 2 or len(self.b_vec) != 2:
            raise DomainError("basis vectors must be two-dimensional")
        (m1, m2), (n1, n2) = self.m_range, self.n_range
        if m2 < m1 or n2 < n1:
            raise DomainError("index ranges must satisfy m1 <= m2 and n1 <= n2")

    @property
    def site_count(self):
        (m1, m2), (n1, n2) = self.m_range, self.n_range
        return (m2 - m1 + 1) * (n2 - n1 + 1)

    @property
    def centers(self) -> np.ndarray:
        """(N, 2) array of centers, m-major order."""
        (m1, m2), (n1, n2) = self.m_range, self.n_range
        m, n = np.meshgrid(np.arange(m1, m2 + 1), np.arange(n1, n2 + 1), indexing="ij")
        a, b = np.asarray(self.a_vec), np.asarray(self.b_vec)
        return (m.ravel()[:, None] * a + n.ravel()[:, None] * b)

    def min_separation(self) -> float:
        c = self.centers
        if len(c) < 2:
            return math.inf
        d = np.hypot(*(c[:, None, :] - c[None, :, :]).transpose(2, 0, 1))
        d[np.diag_indices(len(c))] = np.inf
        return float(d.min())

    def diagnostics(self, bump_width=None, eta=None) -> list[str]:
        """Warnings about bump overlap and about the O(eta) truncation."""
        out = []
        if bump_width is not None and self.site_count > 1:
            ratio = self.min_separation() / bump_width
            if ratio < SEPARATION_RATIO:
                out.append(
                    f"bumps are not well separated: min distance / width = {ratio:.3g} "
                    f"< {SEPARATION_RATIO:g}"
                )
        if eta is not None:
            (m1, m2), (n1, n2) = self.m_range, self.n_range
            size = (m2 - m1) * (n2 - n1) * eta
            if size >= ETA_GUARD:
                out.append(f"(m2-m1)(n2-n1)*eta = {size:.6g} >= {ETA_GUARD:g}; O(eta^2) terms are not negligible")
        return out


def triangular_lattice(a: float, m_range=(-1, 1), n_range=(-1, 1)) -> LatticeSpec:
    """Triangular lattice a (1, 0), a (1/2, sqrt(3)/2); 3x3 sites by default."""
    if not a > 0:
        raise DomainError("lattice constant must be positive")
    return LatticeSpec((a, 0.0), (0.5 * a, 0.5 * math.sqrt(3.0) * a), m_range, n_range)


def triangular_lattice_kab(a: float, k: float, theta: float):
    """(k_a, k_b) for the triangular lattice with k along x."""
    c, s = math.cos(theta), math.sin(theta)
    return a * k * (1.0 - c), 0.5 * a * k * (1.0 - c - math.sqrt(3.0) * s)


def translated_amplitude(f0: complex, center, k_in, k_out) -> complex:
    """Amplitude of a bump moved to ``center``: exp(i (k - k').c) f0."""
    check_elastic(k_in, k_out)
    dk = np.asarray(k_in, dtype=float) - np.asarray(k_out, dtype=float)
    return complex(np.exp(1j * float(dk @ np.asarray(center, dtype=float)))) * f0


def structure_factor_sum(centers, k_in, k_out) -> complex:
    """C = sum_j exp(i (k - k').c_j), summed directly in the given order."""
    check_elastic(k_in, k_out)
    dk = np.asarray(k_in, dtype=float) - np.asarray(k_out, dtype=float)
    phases = np.asarray(centers, dtype=float).reshape(-1, 2) @ dk
    return complex(np.sum(np.exp(1j * phases)))


def _geometric_factor(x, j1, j2):
    """sum_{j=j1}^{j2} e^{i j x} in closed form.

    (e^{i(j2+1)x} - e^{i j1 x})/(e^{ix} - 1), rewritten with half-angle sines
    after reducing x modulo 2 pi so neither difference cancels. Within 1e-9 of
    a multiple of 2 pi the factor is replaced by its limit.
    """
    count = j2 - j1 + 1
    xr = math.remainder(x, 2.0 * math.pi)
    centre = 0.5 * (j1 + j2)
    if abs(xr) < DEGENERATE_WINDOW:
        return count * complex(math.cos(centre * xr), math.sin(centre * xr))
    ratio = math.sin(0.5 * count * xr) / math.sin(0.5 * xr)
    return ratio * complex(math.cos(centre * xr), math.sin(centre * xr))


def structure_factor_lattice(lattice: LatticeSpec, k_in, k_out) -> complex:
    """Closed-form structure factor of a finite lattice."""
    check_elastic(k_in, k_out)
    dk = np.asarray(k_in, dtype=float) - np.asarray(k_out, dtype=float)
    ka = float(dk @ np.asarray(lattice.a_vec))
    kb = float(dk @ np.asarray(lattice.b_vec))
    (m1, m2), (n1, n2) = lattice.m_range, lattice.n_range
    return _geometric_factor(ka, m1, m2) * _geometric_factor(kb, n1, n2)


AmplitudeFn = Callable[[ScatteringKinematics], complex]


def composite_amplitude(
    lattice_or_centers: Union[LatticeSpec, Sequence],
    amplitudes: Union[AmplitudeFn, Sequence[AmplitudeFn]],
    k_in,
    k_out,
) -> complex:
    """Born amplitude of a surface built from translated bumps.

    ``amplitudes`` is either one callable shared by every site (identical
    bumps: C f) or one callable per center. Each callable receives the
    :class:`ScatteringKinematics` of the pair (k_in, k_out).
    """
    kin = ScatteringKinematics.from_vectors(k_in, k_out)
    if callable(amplitudes):
        f = complex(amplitudes(kin))
        if isinstance(lattice_or_centers, LatticeSpec):
            return structure_factor_lattice(lattice_or_centers, k_in, k_out) * f
        return structure_factor_sum(lattice_or_centers, k_in, k_out) * f
    centers = (lattice_or_centers.centers if isinstance(lattice_or_centers, LatticeSpec)
               else np.asarray(lattice_or_centers, dtype=float).reshape(-1, 2))
    if len(amplitudes) != len(centers):
        raise DomainError("need one amplitude callable per center")
    total = 0j
    for c, fn in zip(centers, amplitudes):
        total += translated_amplitude(complex(fn(kin)), c, k_in, k_out)
    return total


@dataclass(frozen=True)
class CompositeSurface:
    """Bumps f_j(|x - c_j|); a single profile is shared by all centers."""

    centers: np.ndarray
    profiles: Sequence[RadialProfile]

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "centers", c)
        profiles = self.profiles
        if isinstance(profiles, RadialProfile):
            profiles = [profiles] * len(c)
        profiles = tuple(profiles)
        if len(profiles) != len(c):
            raise DomainError("need one profile per center or a single shared profile")
        object.__setattr__(self, "profiles", profiles)
        if len(c) > 1:
            for i in range(len(c)):
                for j in range(i + 1, len(c)):
                    reach = 5.0 * (profiles[i].decay_scale + profiles[j].decay_scale) / 2
                    if np.hypot(*(c[i] - c[j])) < reach:
                        warnings.warn(
                            f"bumps {i} and {j} overlap; the sum of single-bump amplitudes is inaccurate",
                            stacklevel=2,
                        )

    def to_graph_surface(self) -> GraphSurface:
        parts = [radial_graph_surface(p, c) for p, c in zip(self.profiles, self.centers)]
        reach = max(np.hypot(*c) + 10.0 * p.decay_scale for p, c in zip(self.profiles, self.centers))
        return sum_graph_surfaces(parts, support_radius=reach)
