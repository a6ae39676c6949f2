"""Surface geometry: radial profiles z = f(r) and general graphs z = h(x, y).

For a radial profile everything the scattering formulas need is carried by

    G = f'/sqrt(1 + f'^2),    G' = f''/(1 + f'^2)^(3/2),

with Gaussian curvature K = G G'/r and mean curvature M = (G/r + G')/2.
Lengths are in whatever unit the caller picks; K is in unit^-2, M in unit^-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .exceptions import DomainError
from .quadrature import DEFAULT_OPTIONS, QuadratureOptions, integrate_oscillatory


class RadialProfile:
    """A smooth height profile f(r) with first and second derivatives.

    Subclasses implement ``f``, ``df`` and ``d2f`` as vectorised functions of
    r >= 0 and set ``decay_scale``, the radius beyond which the bump is
    negligible.
    """

    decay_scale: float = 1.0

    def f(self, r):
        raise NotImplementedError

    def df(self, r):
        raise NotImplementedError

    def d2f(self, r):
        raise NotImplementedError

    def slope_ratio_at_origin(self) -> float:
        """lim_{r->0} f'(r)/r, estimated from f' at a tiny radius."""
        r0 = 1e-8 * self.decay_scale
        return float(self.df(r0)) / r0


class FlatProfile(RadialProfile):
    """f = 0: the plane. Every amplitude vanishes."""

    def __init__(self, decay_scale=1.0):
        self.decay_scale = decay_scale

    def f(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    df = f
    d2f = f

    def slope_ratio_at_origin(self):
        return 0.0


@dataclass(frozen=True)
class GaussianBump(RadialProfile):
    """f(r) = delta * exp(-r^2 / (2 sigma^2))."""

    delta: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")

    @classmethod
    def from_eta(cls, eta, sigma, sign=1.0):
        """Bump with (delta/sigma)^2 = eta and the sign of ``sign``."""
        if eta < 0:
            raise DomainError("eta must be non-negative")
        return cls(math.copysign(sigma * math.sqrt(eta), sign), sigma)

    @property
    def eta(self):
        return (self.delta / self.sigma) ** 2

    @property
    def decay_scale(self):
        return self.sigma

    def f(self, r):
        r = np.asarray(r, dtype=float)
        return self.delta * np.exp(-r * r / (2.0 * self.sigma**2))

    def df(self, r):
        r = np.asarray(r, dtype=float)
        return -r / self.sigma**2 * self.f(r)

    def d2f(self, r):
        r = np.asarray(r, dtype=float)
        s2 = self.sigma**2
        return (r * r / s2 - 1.0) / s2 * self.f(r)

    def slope_ratio_at_origin(self):
        return -self.delta / self.sigma**2


class CallableProfile(RadialProfile):
    """Profile assembled from three user callables."""

    def __init__(self, f, df, d2f, decay_scale=1.0, slope_ratio=None):
        if not decay_scale > 0:
            raise DomainError("decay_scale must be positive")
        self._f, self._df, self._d2f = f, df, d2f
        self.decay_scale = decay_scale
        self._slope_ratio = slope_ratio

    def f(self, r):
        return self._f(np.asarray(r, dtype=float))

    def df(self, r):
        return self._df(np.asarray(r, dtype=float))

    def d2f(self, r):
        return self._d2f(np.asarray(r, dtype=float))

    def slope_ratio_at_origin(self):
        if self._slope_ratio is not None:
            return float(self._slope_ratio)
        return super().slope_ratio_at_origin()


def finite_difference_profile(height: Callable, decay_scale: float = 1.0) -> CallableProfile:
    """Wrap a bare height function, differentiating it numerically.

    Central differences with one Richardson step. ``height`` is extended
    evenly to r < 0, which is exact for a smooth radial function. Expect
    derivatives good to roughly 1e-8 relative rather than machine precision.
    """

    def h(r):
        return height(np.abs(r))

    h1 = 1e-4 * decay_scale
    h2 = 1e-3 * decay_scale

    def d1(r, s):
        return (h(r + s) - h(r - s)) / (2.0 * s)

    def d2(r, s):
        return (h(r + s) - 2.0 * h(r) + h(r - s)) / (s * s)

    def df(r):
        return (4.0 * d1(r, h1 / 2) - d1(r, h1)) / 3.0

    def d2f(r):
        return (4.0 * d2(r, h2 / 2) - d2(r, h2)) / 3.0

    # f'(0) = 0 for an even extension, so f'/r tends to f''(0)
    return CallableProfile(h, df, d2f, decay_scale, slope_ratio=float(d2f(0.0)))


class TabulatedProfile(RadialProfile):
    """Cubic-spline profile through tabulated (r, f) samples.

    The spline is clamped with f' = 0 at both ends, and the surface is taken
    flat at height f(r_max) outside the table.
    """

    def __init__(self, r, f, decay_scale=None):
        r = np.asarray(r, dtype=float)
        f = np.asarray(f, dtype=float)
        if r.ndim != 1 or r.shape != f.shape or r.size < 4:
            raise DomainError("need at least four matching (r, f) samples")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise DomainError("r must start at 0 and increase strictly")
        self._spline = CubicSpline(r, f, bc_type=((1, 0.0), (1, 0.0)))
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)
        self.r_max = float(r[-1])
        self._tail = float(f[-1])
        self.decay_scale = float(decay_scale) if decay_scale else self.r_max / 10.0

    @classmethod
    def from_csv(cls, path, decay_scale=None):
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        if data.shape[1] < 2:
            raise DomainError(f"{path}: expected two columns r,f")
        return cls(data[:, 0], data[:, 1], decay_scale)

    def _inside(self, r, fn, outside):
        r = np.asarray(r, dtype=float)
        return np.where(r <= self.r_max, fn(np.minimum(r, self.r_max)), outside)

    def f(self, r):
        return self._inside(r, self._spline, self._tail)

    def df(self, r):
        return self._inside(r, self._d1, 0.0)

    def d2f(self, r):
        return self._inside(r, self._d2, 0.0)

    def slope_ratio_at_origin(self):
        # f'(0) = 0 is enforced, so f'/r -> f''(0)
        return float(self._d2(0.0))


# -- radial geometry ---------------------------------------------------------


def g_function(profile: RadialProfile, r):
    """G = f'/sqrt(1 + f'^2), the sine of the slope angle."""
    fd = profile.df(r)
    return fd / np.sqrt(1.0 + fd * fd)


def g_derivative(profile: RadialProfile, r):
    """dG/dr = f''/(1 + f'^2)^(3/2)."""
    fd = profile.df(r)
    return profile.d2f(r) / (1.0 + fd * fd) ** 1.5


def g_over_r(profile: RadialProfile, r):
    """G/r, with the r -> 0 limit filled in from the slope ratio."""
    r = np.asarray(r, dtype=float)
    safe = np.where(r > 0, r, 1.0)
    out = g_function(profile, safe) / safe
    return np.where(r > 0, out, profile.slope_ratio_at_origin())


def curvatures(profile: RadialProfile, r):
    """Gaussian and mean curvature (K, M) at radius r > 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("curvatures needs r > 0; use curvatures_at_origin at r = 0")
    G = g_function(profile, r)
    Gd = g_derivative(profile, r)
    return G * Gd / r, 0.5 * (G / r + Gd)


def curvatures_at_origin(profile: RadialProfile):
    """(K, M) at the apex: with c = lim f'/r, K = c^2 and M = c."""
    c = profile.slope_ratio_at_origin()
    return c * c, c


@dataclass(frozen=True)
class SurfaceGeometryAtPoint:
    g11: float
    g22: float
    G: float
    K: float
    M: float


def radial_geometry(profile: RadialProfile, r: float) -> SurfaceGeometryAtPoint:
    """Metric components in polar coordinates together with G, K and M."""
    fd = float(profile.df(r))
    if r > 0:
        K, M = curvatures(profile, r)
    else:
        K, M = curvatures_at_origin(profile)
    return SurfaceGeometryAtPoint(
        1.0 + fd * fd, r * r, float(g_function(profile, r)), float(K), float(M)
    )


def total_gaussian_curvature(
    profile: RadialProfile, options: QuadratureOptions = DEFAULT_OPTIONS
) -> float:
    """Integral of K dA over the surface.

    K dA = 2 pi G G' sqrt(1 + f'^2) dr, which is the exact derivative of
    -pi/(1 + f'^2); an asymptotically flat surface therefore gives zero.
    """

    def integrand(r):
        fd = profile.df(r)
        return g_function(profile, r) * g_derivative(profile, r) * np.sqrt(1.0 + fd * fd)

    res = integrate_oscillatory(integrand, 0.0, options, length_scale=profile.decay_scale)
    return 2.0 * math.pi * res.value


def validate_profile(profile: RadialProfile, tol: float = 1e-8) -> list[str]:
    """Human-readable list of violated profile conditions (empty if fine)."""
    issues = []
    s = profile.decay_scale
    fd0 = float(profile.df(0.0))
    if abs(fd0) > tol:
        issues.append(f"f'(0) = {fd0:.3g} is not zero; the apex is a cone point")
    c = profile.slope_ratio_at_origin()
    if not math.isfinite(c):
        issues.append("f'(r)/r has no finite limit at r = 0")
    r_far = 10.0 * s
    g_far = float(g_function(profile, r_far))
    if abs(r_far * g_far * g_far) > tol * s:
        issues.append(
            f"r G(r)^2 = {r_far * g_far * g_far:.3g} at r = 10*decay_scale; "
            "the profile does not decay fast enough"
        )
    return issues


# -- general graph surfaces --------------------------------------------------


@dataclass(frozen=True)
class GraphSurface:
    """Surface z = h(x, y) given by vectorised height, gradient and Hessian.

    ``gradient`` returns (h_x, h_y); ``hessian`` returns (h_xx, h_xy, h_yy).
    Outside ``support_radius`` the surface must be flat for all practical
    purposes.
    """

    h: Callable
    gradient: Callable
    hessian: Callable
    support_radius: float


class MongeGeometry(NamedTuple):
    inverse_metric: np.ndarray  # (..., 2, 2)
    sqrt_det_g: np.ndarray
    div_terms: np.ndarray  # (..., 2): d_i(sqrt(g) g^{ij}) / sqrt(g)
    K: np.ndarray
    M: np.ndarray


def monge_from_derivatives(p, q, hxx, hxy, hyy) -> MongeGeometry:
    """Monge-patch geometry from first and second partial derivatives."""
    p, q, hxx, hxy, hyy = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (p, q, hxx, hxy, hyy)))
    w2 = 1.0 + p * p + q * q
    w = np.sqrt(w2)
    n11 = 1.0 + q * q
    n12 = -p * q
    n22 = 1.0 + p * p
    inv = np.stack([np.stack([n11, n12], -1), np.stack([n12, n22], -1)], -2) / w2[..., None, None]
    K = (hxx * hyy - hxy * hxy) / (w2 * w2)
    M = (n11 * hxx + 2.0 * n12 * hxy + n22 * hyy) / (2.0 * w2 * w)
    wx = (p * hxx + q * hxy) / w
    wy = (p * hxy + q * hyy) / w
    # d_i(N^{ij}/w) = (d_i N^{ij})/w - N^{ij} (d_i w)/w^2
    div1 = (2.0 * q * hxy) / w - n11 * wx / w2 + (-(hxy * q + p * hyy)) / w - n12 * wy / w2
    div2 = (-(hxx * q + p * hxy)) / w - n12 * wx / w2 + (2.0 * p * hxy) / w - n22 * wy / w2
    div = np.stack([div1 / w, div2 / w], -1)
    return MongeGeometry(inv, w, div, K, M)


def monge_patch_geometry(surface: GraphSurface, x, y) -> MongeGeometry:
    """Inverse metric, sqrt(det g), divergence terms, K and M at (x, y)."""
    p, q = surface.gradient(x, y)
    hxx, hxy, hyy = surface.hessian(x, y)
    return monge_from_derivatives(p, q, hxx, hxy, hyy)


def polar_to_cartesian_derivatives(r, t, ur, ut, urr, urt, utt):
    """Cartesian gradient and Hessian of u(r, theta) from its polar partials.

    Valid for r > 0.
    """
    c, s = np.cos(t), np.sin(t)
    hx = c * ur - s * ut / r
    hy = s * ur + c * ut / r
    r2 = r * r
    hxx = c * c * urr + s * s * ur / r + s * s * utt / r2 - 2 * s * c * urt / r + 2 * s * c * ut / r2
    hyy = s * s * urr + c * c * ur / r + c * c * utt / r2 + 2 * s * c * urt / r - 2 * s * c * ut / r2
    hxy = (s * c * urr - s * c * ur / r - s * c * utt / r2
           + (c * c - s * s) * urt / r - (c * c - s * s) * ut / r2)
    return (hx, hy), (hxx, hxy, hyy)


def radial_graph_surface(
    profile: RadialProfile, center=(0.0, 0.0), support_radius: Optional[float] = None
) -> GraphSurface:
    """The graph of f(|x - center|) as a :class:`GraphSurface`."""
    cx, cy = float(center[0]), float(center[1])
    if support_radius is None:
        support_radius = 10.0 * profile.decay_scale

    def polar(x, y):
        dx = np.asarray(x, dtype=float) - cx
        dy = np.asarray(y, dtype=float) - cy
        return dx, dy, np.hypot(dx, dy)

    def h(x, y):
        _, _, r = polar(x, y)
        return profile.f(r)

    def gradient(x, y):
        dx, dy, r = polar(x, y)
        ratio = _slope_ratio(profile, r)
        return ratio * dx, ratio * dy

    def hessian(x, y):
        dx, dy, r = polar(x, y)
        ratio = _slope_ratio(profile, r)
        fdd = profile.d2f(r)
        safe = np.where(r > 0, r * r, 1.0)
        ex, ey = dx * dx / safe, dy * dy / safe
        exy = dx * dy / safe
        return (fdd * ex + ratio * (1 - ex), (fdd - ratio) * exy, fdd * ey + ratio * (1 - ey))

    return GraphSurface(h, gradient, hessian, support_radius)


def _slope_ratio(profile, r):
    safe = np.where(r > 0, r, 1.0)
    return np.where(r > 0, profile.df(safe) / safe, profile.slope_ratio_at_origin())


def sum_graph_surfaces(surfaces, support_radius=None) -> GraphSurface:
    """Superpose graph surfaces: heights, gradients and Hessians add."""
    surfaces = list(surfaces)
    if support_radius is None:
        support_radius = max(s.support_radius for s in surfaces)

    def h(x, y):
        return sum(s.h(x, y) for s in surfaces)

    def gradient(x, y):
        parts = [s.gradient(x, y) for s in surfaces]
        return tuple(sum(c) for c in zip(*parts))

    def hessian(x, y):
        parts = [s.hessian(x, y) for s in surfaces]
        return tuple(sum(c) for c in zip(*parts))

    return GraphSurface(h, gradient, hessian, support_radius)
