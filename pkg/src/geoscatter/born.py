"""First-Born geometric scattering amplitudes and cross sections.

A particle on the surface feels the Laplace-Beltrami kinetic term plus the
geometric potential (hbar^2/m)(lambda1 K + lambda2 M^2). Amplitudes are
complex numbers in units of length^(1/2); ``|f|^2`` is the 2D differential
cross section.

Kinematics use the lab frame: the incident wave vector is k (1, 0) and the
scattered one k (cos theta, sin theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import DomainError, KinematicsError
from .geometry import (
    GaussianBump,
    GraphSurface,
    RadialProfile,
    g_derivative,
    g_function,
    g_over_r,
    monge_patch_geometry,
)
from .quadrature import (
    DEFAULT_OPTIONS,
    QuadratureOptions,
    integrate_disc_2d,
    integrate_oscillatory,
    integrate_periodic,
)
from .specfun import bessel_i, bessel_j

PHASE = complex(np.exp(-0.75j * np.pi))
FORWARD_THRESHOLD = 1e-8  # below this sin(theta/2) the forward formula is used
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ScatteringKinematics:
    """Wavenumber ``k`` and scattering angle ``theta`` (stored in [0, 2 pi))."""

    k: float
    theta: float

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise DomainError(f"k must be positive and finite, got {self.k!r}")
        if not math.isfinite(self.theta):
            raise DomainError("theta must be finite")
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    @classmethod
    def from_vectors(cls, k_in, k_out, rtol=1e-12):
        k_in = np.asarray(k_in, dtype=float)
        k_out = np.asarray(k_out, dtype=float)
        kin = float(np.hypot(*k_in))
        check_elastic(k_in, k_out, rtol)
        cross = k_in[0] * k_out[1] - k_in[1] * k_out[0]
        dot = float(k_in @ k_out)
        return cls(kin, math.atan2(cross, dot))

    @property
    def half_sin(self):
        """sin(theta/2), non-negative on [0, 2 pi)."""
        return math.sin(0.5 * self.theta)

    @property
    def delta_k(self):
        """Momentum-transfer magnitude |k - k'| = 2 k sin(theta/2)."""
        return 2.0 * self.k * self.half_sin

    @property
    def k_in(self):
        return np.array([self.k, 0.0])

    @property
    def k_out(self):
        return self.k * np.array([math.cos(self.theta), math.sin(self.theta)])


def check_elastic(k_in, k_out, rtol=1e-12):
    a, b = float(np.hypot(*k_in)), float(np.hypot(*k_out))
    if not a > 0:
        raise KinematicsError("incident wave vector must be nonzero")
    if abs(a - b) > rtol * a:
        raise KinematicsError(f"|k_in| = {a!r} and |k_out| = {b!r} differ; scattering must be elastic")


@dataclass(frozen=True)
class CurvatureCouplings:
    """Coefficients of K and M^2 in the geometric potential."""

    lambda1: float
    lambda2: float

    def __post_init__(self):
        if not (math.isfinite(self.lambda1) and math.isfinite(self.lambda2)):
            raise DomainError("couplings must be finite")

    @classmethod
    def thin_layer(cls):
        return THIN_LAYER


THIN_LAYER = CurvatureCouplings(0.5, -0.5)


def prefactor(k):
    """sqrt(pi/(2k)) exp(-3 pi i/4), common to all radial amplitudes."""
    return math.sqrt(math.pi / (2.0 * k)) * PHASE


def differential_cross_section(f) -> float:
    """|f|^2."""
    return f.real * f.real + f.imag * f.imag


# -- radial amplitudes ------------------------------------------------------


def _radial_pieces(profile):
    def G2_over_r(r):
        return g_function(profile, r) * g_over_r(profile, r)

    def mean_part(r):
        # G^2/r + r G'^2
        Gd = g_derivative(profile, r)
        return G2_over_r(r) + r * Gd * Gd

    return G2_over_r, mean_part


def amplitude_radial(
    profile: RadialProfile,
    kin: ScatteringKinematics,
    couplings: CurvatureCouplings,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> complex:
    """Born amplitude of a cylindrically symmetric bump, after integrating by parts.

    f = P int_0^inf dr [ (l2/2)(G^2/r + r G'^2) J0(q r)
                         + k s G^2 (2 l1 + l2 - 1/(2 s^2)) J1(q r) ]

    with s = sin(theta/2), q = 2 k s and P = sqrt(pi/2k) e^{-3 pi i/4}.
    Falls back to :func:`amplitude_forward` when s < 1e-8.
    """
    s = kin.half_sin
    if s < FORWARD_THRESHOLD:
        return amplitude_forward(profile, kin.k, couplings, options)
    k = kin.k
    q = 2.0 * k * s
    l1, l2 = couplings.lambda1, couplings.lambda2
    _, mean_part = _radial_pieces(profile)
    c1 = k * s * (2.0 * l1 + l2 - 0.5 / (s * s))

    def integrand(r):
        G = g_function(profile, r)
        return 0.5 * l2 * mean_part(r) * bessel_j(0, q * r) + c1 * G * G * bessel_j(1, q * r)

    def envelope(r):
        G = g_function(profile, r)
        return abs(0.5 * l2) * mean_part(r) + abs(c1) * G * G

    res = integrate_oscillatory(
        integrand, q, options, envelope=envelope, length_scale=profile.decay_scale
    )
    return prefactor(k) * res.value


def amplitude_radial_pre_ibp(
    profile: RadialProfile,
    kin: ScatteringKinematics,
    couplings: CurvatureCouplings,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> complex:
    """The same amplitude before the integration by parts.

    Kept as an independent check on :func:`amplitude_radial`; the explicit
    1/sin(theta/2) coefficient makes it unusable near forward scattering.
    """
    s = kin.half_sin
    if s < FORWARD_THRESHOLD:
        raise DomainError("pre-integration-by-parts form is singular at theta = 0")
    k = kin.k
    q = 2.0 * k * s
    l1, l2 = couplings.lambda1, couplings.lambda2
    G2_over_r, _ = _radial_pieces(profile)

    def coefficients(r):
        G = g_function(profile, r)
        Gd = g_derivative(profile, r)
        a0 = (-k * k * r * s * s * G * G + 2.0 * l1 * G * Gd
              + 0.5 * l2 * (G2_over_r(r) + 2.0 * G * Gd + r * Gd * Gd))
        a1 = -k * G * G / (2.0 * s) - k * r * s * G * Gd
        return a0, a1

    def integrand(r):
        a0, a1 = coefficients(r)
        return a0 * bessel_j(0, q * r) + a1 * bessel_j(1, q * r)

    def envelope(r):
        a0, a1 = coefficients(r)
        return np.abs(a0) + np.abs(a1)

    res = integrate_oscillatory(
        integrand, q, options, envelope=envelope, length_scale=profile.decay_scale
    )
    return prefactor(k) * res.value


def amplitude_forward(
    profile: RadialProfile,
    k: float,
    couplings: CurvatureCouplings,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> complex:
    """theta = 0 amplitude. It does not involve lambda1 at all."""
    if not k > 0:
        raise DomainError("k must be positive")
    l2 = couplings.lambda2
    G2_over_r, mean_part = _radial_pieces(profile)

    def integrand(r):
        G = g_function(profile, r)
        return 0.5 * l2 * mean_part(r) - 0.5 * k * k * r * G * G

    def envelope(r):
        G = g_function(profile, r)
        return abs(0.5 * l2) * mean_part(r) + 0.5 * k * k * r * G * G

    res = integrate_oscillatory(
        integrand, 0.0, options, envelope=envelope, length_scale=profile.decay_scale
    )
    return prefactor(k) * res.value


def amplitude_backward(
    profile: RadialProfile,
    k: float,
    couplings: CurvatureCouplings,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> complex:
    """theta = pi amplitude; both K and M^2 contribute here."""
    if not k > 0:
        raise DomainError("k must be positive")
    l1, l2 = couplings.lambda1, couplings.lambda2
    _, mean_part = _radial_pieces(profile)
    c1 = k * (2.0 * l1 + l2 - 0.5)

    def integrand(r):
        G = g_function(profile, r)
        return 0.5 * l2 * mean_part(r) * bessel_j(0, 2 * k * r) + c1 * G * G * bessel_j(1, 2 * k * r)

    def envelope(r):
        G = g_function(profile, r)
        return abs(0.5 * l2) * mean_part(r) + abs(c1) * G * G

    res = integrate_oscillatory(
        integrand, 2.0 * k, options, envelope=envelope, length_scale=profile.decay_scale
    )
    return prefactor(k) * res.value


# -- Gaussian bump, leading order in eta --------------------------------------


def gaussian_first_order_array(eta, sigma, k, theta, lambda1, lambda2):
    """Vectorised leading-order Gaussian-bump amplitude (numpy broadcasting)."""
    k = np.asarray(k, dtype=float)
    s2 = np.sin(0.5 * np.asarray(theta, dtype=float)) ** 2
    z = (sigma * k) ** 2
    bracket = z * (lambda1 * s2 - 0.25) + 0.25 * lambda2 * (z * z * s2 * s2 + 2.0)
    return np.sqrt(np.pi / (2.0 * k)) * PHASE * eta * bracket * np.exp(-z * s2)


def gaussian_amplitude_first_order(
    bump: GaussianBump, kin: ScatteringKinematics, couplings: CurvatureCouplings
) -> complex:
    """O(eta) amplitude of the Gaussian bump, eta = (delta/sigma)^2.

    P eta [ (sigma k)^2 (l1 s^2 - 1/4) + (l2/4)((sigma k)^4 s^4 + 2) ] exp(-(sigma k s)^2)
    """
    return complex(gaussian_first_order_array(
        bump.eta, bump.sigma, kin.k, kin.theta, couplings.lambda1, couplings.lambda2
    ))


def total_cross_section_numeric(
    amplitude_fn: Callable[[float], complex],
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> float:
    """Integral of |f(theta)|^2 over a full turn, by the periodic trapezoid rule."""
    res = integrate_periodic(
        lambda t: differential_cross_section(complex(amplitude_fn(t))), TWO_PI, options
    )
    return float(res.value)


def _p0(z, l1, l2):
    return (64 * l2**2 + 64 * l2 * (2 * l1 - 1) * z
            + (16 - 64 * l1 + 128 * l1**2 + 16 * l1 * l2 + 35 * l2**2) * z**2
            + 4 * l2 * (16 * l1 + l2 - 4) * z**3 + 8 * l2**2 * z**4)


def _p1(z, l1, l2):
    return -2 * ((32 * l1**2 + 80 * l1 * l2 + 11 * l2**2) * z
                 + 4 * (16 * l1**2 + 5 * l2**2 + 6 * l1 * l2 - 8 * l1 - l2) * z**2
                 + 4 * l2 * (l2 + 8 * l1 - 2) * z**3 + 4 * l2**2 * z**4)


def gaussian_total_cross_section(bump: GaussianBump, k, couplings: CurvatureCouplings):
    """Leading-order total cross section of the Gaussian bump.

    (pi^2/256k) e^{-z} [p0(z) I0(z) + p1(z) I1(z)] eta^2 with z = (sigma k)^2.
    ``k`` may be an array.
    """
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise DomainError("k must be positive")
    z = (bump.sigma * k) ** 2
    l1, l2 = couplings.lambda1, couplings.lambda2
    # e^{-z} I_n(z) evaluated directly in scaled form
    val = (_p0(z, l1, l2) * bessel_i(0, z, scaled=True)
           + _p1(z, l1, l2) * bessel_i(1, z, scaled=True))
    out = math.pi**2 / (256.0 * k) * val * bump.eta**2
    return out[()] if isinstance(out, np.ndarray) else out


# -- two-dimensional oracle ---------------------------------------------------


def born_integrand_2d(surface: GraphSurface, x, y, k_in, couplings: CurvatureCouplings):
    """Bracket acting on the incident plane wave, divided by the wave itself.

    -(delta^{ij} - g^{ij}) k_i k_j - i k_j d_i(sqrt(g) g^{ij})/sqrt(g)
    + 2 (l1 K + l2 M^2)
    """
    geo = monge_patch_geometry(surface, x, y)
    kx, ky = float(k_in[0]), float(k_in[1])
    gi = geo.inverse_metric
    quad = (1 - gi[..., 0, 0]) * kx * kx - 2 * gi[..., 0, 1] * kx * ky + (1 - gi[..., 1, 1]) * ky * ky
    drift = geo.div_terms[..., 0] * kx + geo.div_terms[..., 1] * ky
    pot = 2.0 * (couplings.lambda1 * geo.K + couplings.lambda2 * geo.M**2)
    return -quad - 1j * drift + pot


def amplitude_oracle_2d(
    surface: GraphSurface,
    k_in,
    k_out,
    couplings: CurvatureCouplings,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> complex:
    """Born amplitude by direct quadrature over the plane.

    f = e^{-3 pi i/4} / sqrt(8 pi k) * int d^2x e^{i (k - k').x} B(x),
    B from :func:`born_integrand_2d`. No symmetry of the surface is assumed.
    """
    k_in = np.asarray(k_in, dtype=float)
    k_out = np.asarray(k_out, dtype=float)
    check_elastic(k_in, k_out)
    k = float(np.hypot(*k_in))
    dk = k_in - k_out

    def integrand(x, y):
        return np.exp(1j * (dk[0] * x + dk[1] * y)) * born_integrand_2d(surface, x, y, k_in, couplings)

    res = integrate_disc_2d(integrand, surface.support_radius, options)
    return PHASE / math.sqrt(8.0 * math.pi * k) * complex(res.value)


def shape_peaks(x, y):
    """Indices of strict interior local maxima of a sampled curve."""
    y = np.asarray(y)
    return np.nonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:]))[0] + 1
