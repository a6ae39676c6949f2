"""Small departures from cylindrical symmetry.

The surface is z = f(r) + eps * sum_n [a_n(r) cos(n phi) + b_n(r) sin(n phi)]
and everything here is first order in eps.

Frame convention: the polar angle phi of the harmonics is measured from the
momentum transfer k - k'. In that frame the incident and scattered wave
vectors are k (sin(theta/2), cos(theta/2)) and k (-sin(theta/2), cos(theta/2))
(see :func:`transfer_frame_vectors`). The closed forms for the perturbed
Gaussian bump only hold in this frame.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .born import (
    FORWARD_THRESHOLD,
    PHASE,
    CurvatureCouplings,
    ScatteringKinematics,
    amplitude_oracle_2d,
    differential_cross_section,
    gaussian_amplitude_first_order,
)
from .exceptions import DomainError, SingularConfigurationError
from .geometry import (
    CallableProfile,
    GaussianBump,
    GraphSurface,
    RadialProfile,
    polar_to_cartesian_derivatives,
)
from .quadrature import DEFAULT_OPTIONS, QuadratureOptions, integrate_oscillatory
from .specfun import bessel_j

SMALLNESS_LIMIT = 0.1


@dataclass(frozen=True)
class Harmonic:
    """Angular harmonic n >= 1 with radial coefficients a_n, b_n.

    ``a`` and ``b`` are profile-like objects (``f``, ``df``, ``d2f``);
    ``None`` stands for an identically zero coefficient.
    """

    n: int
    a: Optional[RadialProfile] = None
    b: Optional[RadialProfile] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"harmonic order must be a positive integer, got {self.n!r}")


def _triple(fn, r):
    if fn is None:
        z = np.zeros_like(np.asarray(r, dtype=float))
        return z, z, z
    return fn.f(r), fn.df(r), fn.d2f(r)


@dataclass(frozen=True)
class PerturbationSpec:
    epsilon: float
    harmonics: Sequence[Harmonic]
    base: RadialProfile
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "harmonics", tuple(self.harmonics))
        if self.check:
            for msg in self.diagnostics():
                warnings.warn(msg, stacklevel=3)

    def diagnostics(self) -> list[str]:
        """Violated smallness and regularity conditions, as messages."""
        out = []
        scale = self.base.decay_scale
        r = np.linspace(0.0, 5.0 * scale, 401)[1:]
        f = np.abs(self.base.f(r))
        pert = np.zeros_like(r)
        for h in self.harmonics:
            for fn in (h.a, h.b):
                if fn is not None:
                    pert += np.abs(fn.f(r))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(f > 0, abs(self.epsilon) * pert / f, np.where(pert > 0, np.inf, 0.0))
        worst = float(np.max(ratio)) if ratio.size else 0.0
        if worst > SMALLNESS_LIMIT:
            out.append(
                f"perturbation not small: eps*sum(|a_n|+|b_n|)/|f| reaches {worst:.3g} "
                f"(limit {SMALLNESS_LIMIT})"
            )
        r0 = 1e-6 * scale
        for h in self.harmonics:
            need = min(h.n, 2)
            for name, fn in (("a", h.a), ("b", h.b)):
                if fn is None:
                    continue
                v0, v1 = abs(float(fn.f(r0))), abs(float(fn.f(2 * r0)))
                if v1 == 0.0 and v0 == 0.0:
                    continue
                power = math.log2(v1 / v0) if v0 > 0 else math.inf
                if power < need - 0.05:
                    out.append(
                        f"{name}_{h.n}(r) ~ r^{power:.2f} near r = 0; regular curvature "
                        f"needs at least r^{need}"
                    )
        return out


@dataclass(frozen=True)
class PerturbedGaussianSpec:
    """Gaussian bump with a_1 = (r/alpha1) f, a_2 = (r/alpha2)^2 f,
    b_1 = (r/beta1) f, b_2 = (r/beta2)^2 f.

    An infinite length switches the corresponding harmonic off.
    """

    bump: GaussianBump
    alpha1: float
    alpha2: float
    beta1: float = math.inf
    beta2: float = math.inf
    epsilon: float = 0.0

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "beta1", "beta2"):
            v = getattr(self, name)
            if v == 0 or math.isnan(v):
                raise DomainError(f"{name} must be nonzero")

    def to_perturbation_spec(self, check=True) -> PerturbationSpec:
        base = self.bump

        def part(length, power):
            if math.isinf(length):
                return None
            return power_weighted(base, power, length)

        harmonics = [
            Harmonic(1, part(self.alpha1, 1), part(self.beta1, 1)),
            Harmonic(2, part(self.alpha2, 2), part(self.beta2, 2)),
        ]
        return PerturbationSpec(self.epsilon, harmonics, base, check=check)


def power_weighted(profile: RadialProfile, power: int, length: float) -> CallableProfile:
    """(r/length)^power * f(r) with analytic derivatives, power in {1, 2}."""
    c = 1.0 / length**power
    if power == 1:
        return CallableProfile(
            lambda r: c * r * profile.f(r),
            lambda r: c * (profile.f(r) + r * profile.df(r)),
            lambda r: c * (2 * profile.df(r) + r * profile.d2f(r)),
            profile.decay_scale,
            slope_ratio=0.0,
        )
    if power == 2:
        return CallableProfile(
            lambda r: c * r * r * profile.f(r),
            lambda r: c * (2 * r * profile.f(r) + r * r * profile.df(r)),
            lambda r: c * (2 * profile.f(r) + 4 * r * profile.df(r) + r * r * profile.d2f(r)),
            profile.decay_scale,
            slope_ratio=2.0 * c * float(profile.f(0.0)),
        )
    raise DomainError("power must be 1 or 2")


def transfer_frame_vectors(kin: ScatteringKinematics):
    """(k_in, k_out) rotated so that k_in - k_out points along +x."""
    s, c = math.sin(0.5 * kin.theta), math.cos(0.5 * kin.theta)
    return kin.k * np.array([s, c]), kin.k * np.array([-s, c])


# -- geometry of the perturbed surface ---------------------------------------


def perturbed_metric(spec: PerturbationSpec, r: float, theta: float) -> np.ndarray:
    """Induced metric in (r, phi) coordinates, to first order in eps."""
    if not r > 0:
        raise DomainError("r must be positive")
    fd = float(spec.base.df(r))
    g_rr, g_rt = 0.0, 0.0
    for h in spec.harmonics:
        n = h.n
        a, ad, _ = _triple(h.a, r)
        b, bd, _ = _triple(h.b, r)
        cs, sn = math.cos(n * theta), math.sin(n * theta)
        g_rr += 2.0 * fd * (ad * cs + bd * sn)
        g_rt += -n * fd * (a * sn - b * cs)
    eps = spec.epsilon
    return np.array([[1.0 + fd * fd + eps * g_rr, eps * g_rt], [eps * g_rt, r * r]])


def _k_coefficient(n, r, fd, fdd, W, a, ad, add):
    return (r * fd * add - n * n * fdd * a) / (r * r * W**2) + (1 - 3 * fd * fd) * fdd * ad / (r * W**3)


def _m_coefficient(n, r, fd, fdd, W, a, ad, add):
    return (-n * n * a / (2 * r * r * np.sqrt(W)) - 3 * fd * fdd * ad / (2 * W**2.5)
            + (ad + r * add) / (2 * r * W**1.5))


def curvature_corrections(spec: PerturbationSpec, r, theta):
    """First-order corrections (K_eps, M_eps) with K~ = K + eps K_eps, M~ = M + eps M_eps."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("r must be positive")
    fd, fdd = spec.base.df(r), spec.base.d2f(r)
    W = 1.0 + fd * fd
    K = np.zeros_like(r)
    M = np.zeros_like(r)
    for h in spec.harmonics:
        n = h.n
        cs, sn = np.cos(n * theta), np.sin(n * theta)
        for fn, ang in ((h.a, cs), (h.b, sn)):
            if fn is None:
                continue
            trip = _triple(fn, r)
            K = K + ang * _k_coefficient(n, r, fd, fdd, W, *trip)
            M = M + ang * _m_coefficient(n, r, fd, fdd, W, *trip)
    return K, M


# -- amplitudes ---------------------------------------------------------------


def _term_coefficients(spec, h, n, kin, couplings):
    """Radial coefficients of J_{n+2}, J_{n+1}, J_n for signed index n."""
    k = kin.k
    s, c = math.sin(0.5 * kin.theta), math.cos(0.5 * kin.theta)
    cos_t, sin_t = math.cos(kin.theta), math.sin(kin.theta)
    sg = 1.0 if n > 0 else -1.0
    m = abs(n)
    l1, l2 = couplings.lambda1, couplings.lambda2
    base = spec.base

    def coeffs(r):
        fd, fdd = base.df(r), base.d2f(r)
        W = 1.0 + fd * fd

        def X(phi, phid):
            return n * fd * phi / W - r * fd * phid / W**2

        def Y(phi, phid, phidd):
            return (n * (n + 1) * fd * phi / (r * W)
                    + (n * fdd * phi - 2 * fd * phid - r * fd * phidd) / W**2
                    - r * fdd * (1 - 3 * fd * fd) * phid / W**3)

        ta = _triple(h.a, r)
        tb = _triple(h.b, r)
        A = k * k * (cos_t * X(ta[0], ta[1]) + sg * sin_t * X(tb[0], tb[1]))
        B = k * (s * Y(*ta) - sg * c * Y(*tb))
        G = fd / np.sqrt(W)
        mean = 0.5 * (G / r + fdd / W**1.5)
        C = r * (2 * l1 * _k_coefficient(m, r, fd, fdd, W, *ta)
                 + 4 * l2 * mean * _m_coefficient(m, r, fd, fdd, W, *ta)
                 - k * k * fd * ta[1] / W**2)
        return A, B, C

    return coeffs


def perturbation_amplitude(
    spec: PerturbationSpec,
    kin: ScatteringKinematics,
    couplings: CurvatureCouplings,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> complex:
    """First-order correction f_eps in f~ = f + eps f_eps.

    Sum over n = +-1, +-2, ... up to the highest harmonic present of

        i^n int dr { A_n(r) J_{n+2}(q r) + B_n(r) J_{n+1}(q r) + C_n(r) J_n(q r) }

    times sqrt(pi/8k) e^{-3 pi i/4}, q = 2 k sin(theta/2). At theta = 0 only
    the Bessel factors of order zero survive and are integrated directly.
    """
    s = math.sin(0.5 * kin.theta)
    forward = s < FORWARD_THRESHOLD
    q = 0.0 if forward else 2.0 * kin.k * s
    total = 0j
    for h in spec.harmonics:
        for n in (h.n, -h.n):
            coeffs = _term_coefficients(spec, h, n, kin, couplings)
            orders = (n + 2, n + 1, n)
            live = [j for j, o in enumerate(orders) if not (forward and o != 0)]
            if not live:
                continue

            def integrand(r, coeffs=coeffs, orders=orders, live=live):
                parts = coeffs(r)
                return sum(parts[j] * bessel_j(orders[j], q * r) for j in live)

            def envelope(r, coeffs=coeffs, live=live):
                parts = coeffs(r)
                return sum(np.abs(parts[j]) for j in live)

            res = integrate_oscillatory(
                integrand, q, options, envelope=envelope,
                length_scale=spec.base.decay_scale,
            )
            total += (1j ** (n % 4)) * res.value
    return math.sqrt(math.pi / (8.0 * kin.k)) * PHASE * total


def perturbed_gaussian_amplitude_first_order(
    spec: PerturbedGaussianSpec, kin: ScatteringKinematics, couplings: CurvatureCouplings
) -> complex:
    """O(eta) value of f_eps for the perturbed Gaussian bump.

    Only alpha1 and alpha2 enter; the b-harmonics contribute at O(eta^2).
    """
    sigma, k = spec.bump.sigma, kin.k
    s = math.sin(0.5 * kin.theta)
    s2 = s * s
    z = (sigma * k) ** 2
    l1, l2 = couplings.lambda1, couplings.lambda2
    # sin^2(theta/2) multiplied through the bracket so theta = 0 needs no limit
    quad = 1.0 - z * s2 - 4 * l1 * s2 * (1 - z * s2) + l2 * z * z * s2**3
    t2 = -(sigma**4) * k * k / (2.0 * spec.alpha2**2) * quad
    t1 = 1j * sigma**2 * k * s / (2.0 * spec.alpha1) * (-z + 4 * l1 * z * s2 + l2 * (2 + z * z * s2 * s2))
    return math.sqrt(math.pi / (2.0 * k)) * PHASE * (t1 + t2) * math.exp(-z * s2) * spec.bump.eta


def z_factors(spec: PerturbedGaussianSpec, kin: ScatteringKinematics, couplings: CurvatureCouplings):
    """(Z1, Z2) with f~ = f (1 + eps (Z1 + i Z2)) for the perturbed Gaussian."""
    sigma, k = spec.bump.sigma, kin.k
    s = math.sin(0.5 * kin.theta)
    s2 = s * s
    z = (sigma * k) ** 2
    l1, l2 = couplings.lambda1, couplings.lambda2
    u = 1.0 - z * s2
    den = (4 * l1 * s2 - 1) * z + l2 * (z * z * s2 * s2 + 2)
    size = abs(4 * l1 * s2 * z) + z + abs(l2) * (z * z * s2 * s2 + 2)
    if abs(den) <= 1e-13 * size:
        raise SingularConfigurationError(
            f"leading-order amplitude vanishes at k = {k!r}, theta = {kin.theta!r}; Z1 is undefined"
        )
    Z1 = 2 * sigma**2 / spec.alpha2**2 * (u - l2 * (u * u + 1) / den)
    Z2 = 2 * sigma**2 * k * s / spec.alpha1
    return Z1, Z2


def perturbed_cross_section(
    spec: PerturbedGaussianSpec, kin: ScatteringKinematics, couplings: CurvatureCouplings
) -> float:
    """|f|^2 (1 + 2 eps Z1), the leading-order cross section of the perturbed bump."""
    Z1, _ = z_factors(spec, kin, couplings)
    f = gaussian_amplitude_first_order(spec.bump, kin, couplings)
    return differential_cross_section(f) * (1.0 + 2.0 * spec.epsilon * Z1)


# -- brute-force route ---------------------------------------------------------


def perturbed_graph_surface(spec: PerturbationSpec, epsilon: Optional[float] = None,
                            support_radius: Optional[float] = None) -> GraphSurface:
    """The full surface f + eps * sum(...) as a graph over the plane (harmonic angle from +x)."""
    eps = spec.epsilon if epsilon is None else epsilon
    base = spec.base
    if support_radius is None:
        support_radius = 10.0 * base.decay_scale

    def polar_parts(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r = np.hypot(x, y)
        t = np.arctan2(y, x)
        ur, urr = base.df(r), base.d2f(r)
        ut = urt = utt = 0.0
        for h in spec.harmonics:
            n = h.n
            cs, sn = np.cos(n * t), np.sin(n * t)
            a, ad, add = _triple(h.a, r)
            b, bd, bdd = _triple(h.b, r)
            ur = ur + eps * (ad * cs + bd * sn)
            urr = urr + eps * (add * cs + bdd * sn)
            ut = ut + eps * n * (-a * sn + b * cs)
            urt = urt + eps * n * (-ad * sn + bd * cs)
            utt = utt - eps * n * n * (a * cs + b * sn)
        return r, t, ur, ut, urr, urt, utt

    def h(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r, t = np.hypot(x, y), np.arctan2(y, x)
        z = base.f(r)
        for hm in spec.harmonics:
            a = _triple(hm.a, r)[0]
            b = _triple(hm.b, r)[0]
            z = z + eps * (a * np.cos(hm.n * t) + b * np.sin(hm.n * t))
        return z

    def gradient(x, y):
        return polar_to_cartesian_derivatives(*polar_parts(x, y))[0]

    def hessian(x, y):
        return polar_to_cartesian_derivatives(*polar_parts(x, y))[1]

    return GraphSurface(h, gradient, hessian, support_radius)


def perturbation_amplitude_oracle(
    spec: PerturbationSpec,
    kin: ScatteringKinematics,
    couplings: CurvatureCouplings,
    steps=(1e-3, 5e-4),
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> complex:
    """f_eps from central eps-differences of the 2D Born quadrature.

    Two step sizes are combined by Richardson extrapolation, which removes
    the O(eps^2) error of the central difference.
    """
    k_in, k_out = transfer_frame_vectors(kin)

    def central(h):
        plus = amplitude_oracle_2d(perturbed_graph_surface(spec, h), k_in, k_out, couplings, options)
        minus = amplitude_oracle_2d(perturbed_graph_surface(spec, -h), k_in, k_out, couplings, options)
        return (plus - minus) / (2.0 * h)

    h1, h2 = steps
    d1, d2 = central(h1), central(h2)
    return (h1 * h1 * d2 - h2 * h2 * d1) / (h1 * h1 - h2 * h2)
