"""Quadrature engines.

``integrate_oscillatory``
    Globally adaptive 15-point Gauss-Kronrod on [0, R], where the cut-off R is
    found from an envelope of the integrand and the initial panels end at the
    zeros of a Bessel factor J_nu(w r).
``integrate_disc_2d``
    Tensor Gauss-Legendre on a polar grid over a disc, refined dyadically.
``integrate_periodic``
    Trapezoid rule on a full period, doubled until converged.

Integrands are called with numpy arrays and must be vectorised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import ConvergenceError, DomainError, EvaluationError
from .specfun import MAX_ZERO_COUNT, bessel_j_zeros

# 15-point Kronrod nodes on [0, 1] (symmetric), with the embedded 7-point
# Gauss rule living on the odd-indexed nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_W_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_W_GAUSS = np.zeros(15)
_W_GAUSS[1:7:2] = _WG[:3]
_W_GAUSS[7] = _WG[3]
_W_GAUSS[9:15:2] = _WG[2::-1]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureOptions:
    """Tolerances and limits shared by the integrators.

    ``truncation_radius`` selects the fixed-radius policy for semi-infinite
    integrals; when it is ``None`` the cut-off is placed where the envelope
    drops below ``envelope_threshold``.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_panels: int = 4096
    truncation_radius: Optional[float] = None
    envelope_threshold: float = 1e-14

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.max_panels < 8:
            raise DomainError("max_panels must be at least 8")
        if self.truncation_radius is not None and not self.truncation_radius > 0:
            raise DomainError("truncation_radius must be positive")
        if not self.envelope_threshold > 0:
            raise DomainError("envelope_threshold must be positive")

    def target(self, value):
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_OPTIONS = QuadratureOptions()


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | float
    error_estimate: float
    panels_used: int
    truncation_radius: float


def _evaluate(fn, x):
    y = np.asarray(fn(x))
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape)
    bad = ~np.isfinite(y)
    if np.any(bad):
        where = float(np.asarray(x)[bad].flat[0])
        raise EvaluationError(f"integrand is not finite at r = {where!r}", where)
    return y


def _gk15(fn, a, b):
    """Kronrod values and error estimates for panels [a_i, b_i] in one call."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    y = _evaluate(fn, x)
    kron = y @ _W_KRONROD
    gauss = y @ _W_GAUSS
    mean = 0.5 * kron
    resasc = np.abs(y - mean[:, None]) @ _W_KRONROD
    resabs = np.abs(y) @ _W_KRONROD
    diff = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(resasc > 0, np.minimum(1.0, (200.0 * diff / resasc) ** 1.5), 1.0)
    err = np.where(resasc > 0, resasc * scale, diff)
    floor = 50.0 * _EPS * resabs
    err = np.maximum(err, floor)
    return kron * half, err * np.abs(half)


def _find_truncation(envelope, start, threshold, r_cap=1e12, samples=512):
    """Smallest sampled radius beyond which ``envelope`` stays under threshold.

    Doubles the search window until the outer half of it is quiet.
    """
    R = start
    while True:
        grid = np.linspace(0.0, 2.0 * R, 2 * samples + 1)[1:]
        env = np.abs(np.asarray(envelope(grid))).astype(float)
        env = np.broadcast_to(env, grid.shape)
        if not np.all(np.isfinite(env)):
            bad = grid[~np.isfinite(env)][0]
            raise EvaluationError(f"envelope is not finite at r = {bad!r}", float(bad))
        loud = np.nonzero(env >= threshold)[0]
        if loud.size == 0:
            return float(grid[0])
        if grid[loud[-1]] <= R:
            return float(grid[min(loud[-1] + 1, grid.size - 1)])
        R *= 2.0
        if R > r_cap:
            raise ConvergenceError(f"envelope does not decay below {threshold:g} before r = {r_cap:g}")


def _adaptive(fn, edges, options, radius):
    a, b = edges[:-1].copy(), edges[1:].copy()
    if a.size > options.max_panels:
        raise ConvergenceError(
            f"{a.size} initial panels exceed max_panels = {options.max_panels}"
        )
    vals, errs = _gk15(fn, a, b)
    while True:
        total = vals.sum()
        err = float(errs.sum())
        if err <= options.target(total):
            return QuadratureResult(_scalar(total), err, a.size, radius)
        room = options.max_panels - a.size
        if room <= 0:
            best = QuadratureResult(_scalar(total), err, a.size, radius)
            raise ConvergenceError(
                f"tolerance {options.target(total):.3g} not reached with "
                f"{a.size} panels (error estimate {err:.3g})",
                best,
            )
        # bisect the worst panels; a batch keeps the number of numpy calls small
        nsplit = min(room, max(1, a.size // 8))
        worst = np.argsort(errs)[::-1][:nsplit]
        keep = np.ones(a.size, dtype=bool)
        keep[worst] = False
        wa, wb = a[worst], b[worst]
        wm = 0.5 * (wa + wb)
        na = np.concatenate([wa, wm])
        nb = np.concatenate([wm, wb])
        nv, ne = _gk15(fn, na, nb)
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])


def _scalar(v):
    v = complex(v) if np.iscomplexobj(v) else float(v)
    return v


def integrate_oscillatory(
    integrand: Callable,
    oscillation_wavenumber: float,
    options: QuadratureOptions = DEFAULT_OPTIONS,
    *,
    envelope: Optional[Callable] = None,
    bessel_order: int = 0,
    length_scale: float = 1.0,
) -> QuadratureResult:
    """Integrate ``integrand`` over [0, inf).

    The integrand is assumed to carry Bessel factors J_nu(w r) with
    w = ``oscillation_wavenumber``; initial panels end at the zeros of
    J_``bessel_order``(w r). ``envelope`` should bound |integrand| with the
    Bessel factors replaced by 1; by default |integrand| itself is sampled.
    ``length_scale`` seeds the search for the cut-off radius.
    """
    if oscillation_wavenumber < 0 or not math.isfinite(oscillation_wavenumber):
        raise DomainError("oscillation_wavenumber must be finite and non-negative")
    if options.truncation_radius is not None:
        R = float(options.truncation_radius)
    else:
        env = envelope if envelope is not None else integrand
        R = _find_truncation(env, length_scale, options.envelope_threshold)

    edges = np.linspace(0.0, R, 9)
    w = oscillation_wavenumber
    if w > 0:
        count = int(w * R / math.pi) + 2
        if count > min(MAX_ZERO_COUNT, options.max_panels):
            raise ConvergenceError(
                f"{count} oscillation panels needed below r = {R:g}, "
                f"more than max_panels = {options.max_panels}"
            )
        zeros = bessel_j_zeros(bessel_order, count) / w
        zeros = zeros[zeros < R]
        if zeros.size:
            edges = np.concatenate([[0.0], zeros, [R]])
    return _adaptive(integrand, edges, options, R)


def _gauss_legendre_panels(lo, hi, npanels, order):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, npanels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _disc_sum(integrand, radius, nr, nt, order):
    r, wr = _gauss_legendre_panels(0.0, radius, nr, order)
    t, wt = _gauss_legendre_panels(0.0, 2.0 * math.pi, nt, order)
    rr, tt = np.meshgrid(r, t, indexing="ij")
    x = rr * np.cos(tt)
    y = rr * np.sin(tt)
    vals = np.broadcast_to(np.asarray(integrand(x, y)), x.shape)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = np.argwhere(bad)[0]
        where = (float(x[tuple(i)]), float(y[tuple(i)]))
        raise EvaluationError(f"integrand is not finite at (x, y) = {where}", where)
    return np.einsum("i,ij,j->", wr * r, vals, wt)


def integrate_disc_2d(
    integrand: Callable,
    radius: float,
    options: QuadratureOptions = DEFAULT_OPTIONS,
    *,
    order: int = 16,
) -> QuadratureResult:
    """Integrate ``integrand(x, y)`` over the disc x^2 + y^2 <= radius^2.

    Both polar directions are split into equal panels carrying ``order``-point
    Gauss-Legendre rules; the panel counts double until two successive
    levels agree to tolerance. ``panels_used`` counts polar cells.
    """
    if not radius > 0:
        raise DomainError("radius must be positive")
    nr, nt = 2, 4
    coarse = _disc_sum(integrand, radius, nr, nt, order)
    while True:
        nr, nt = 2 * nr, 2 * nt
        if nr * nt > options.max_panels:
            best = QuadratureResult(_scalar(coarse), math.inf, nr * nt // 4, radius)
            raise ConvergenceError(
                f"disc quadrature did not converge within {options.max_panels} cells", best
            )
        fine = _disc_sum(integrand, radius, nr, nt, order)
        err = abs(fine - coarse)
        if err <= options.target(fine):
            return QuadratureResult(_scalar(fine), float(err), nr * nt, radius)
        coarse = fine


def integrate_periodic(
    fn: Callable[[float], complex | float],
    period: float = 2.0 * math.pi,
    options: QuadratureOptions = DEFAULT_OPTIONS,
    *,
    start: int = 16,
) -> QuadratureResult:
    """Integral of a smooth periodic function over one period.

    ``fn`` is called one point at a time. Nodes are reused between levels.
    """
    n = start
    h = period / n
    samples = [fn(i * h) for i in range(n)]
    total = math.fsum(np.real(samples)) + 1j * math.fsum(np.imag(samples))
    prev = total * h
    while True:
        if 2 * n > options.max_panels * 16:
            raise ConvergenceError(
                "periodic quadrature did not converge",
                QuadratureResult(_scalar(prev), math.inf, n, period),
            )
        h = period / (2 * n)
        new = [fn((2 * i + 1) * h) for i in range(n)]
        total += math.fsum(np.real(new)) + 1j * math.fsum(np.imag(new))
        n *= 2
        cur = total * h
        err = abs(cur - prev)
        if err <= options.target(cur):
            if cur.imag == 0:
                cur = cur.real
            return QuadratureResult(_scalar(cur), float(err), n, period)
        prev = cur
