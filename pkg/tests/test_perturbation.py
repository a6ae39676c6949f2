import math
import warnings

import numpy as np
import pytest

from geoscatter.born import (
    THIN_LAYER,
    CurvatureCouplings,
    ScatteringKinematics,
    differential_cross_section,
    gaussian_amplitude_first_order,
)
from geoscatter.exceptions import SingularConfigurationError
from geoscatter.geometry import CallableProfile, FlatProfile, GaussianBump, monge_patch_geometry
from geoscatter.perturbation import (
    Harmonic,
    PerturbationSpec,
    PerturbedGaussianSpec,
    curvature_corrections,
    perturbation_amplitude,
    perturbation_amplitude_oracle,
    perturbed_cross_section,
    perturbed_gaussian_amplitude_first_order,
    perturbed_graph_surface,
    perturbed_metric,
    power_weighted,
    z_factors,
)


def gaussian_spec(eta=0.01, sigma=1.0, a1=1.0, a2=1.0, b1=1.0, b2=1.0, eps=0.0):
    return PerturbedGaussianSpec(GaussianBump.from_eta(eta, sigma), a1, a2, b1, b2, eps)


def test_metric_trivial_cases():
    b = GaussianBump(0.4, 1.0)
    h = Harmonic(1, power_weighted(b, 1, 1.0))
    spec0 = PerturbationSpec(0.0, [h], b)
    fd = b.df(0.7)
    assert np.allclose(perturbed_metric(spec0, 0.7, 1.0), [[1 + fd * fd, 0], [0, 0.49]])
    flat = PerturbationSpec(0.01, [Harmonic(2, power_weighted(b, 2, 1.0))], FlatProfile(), check=False)
    assert np.allclose(perturbed_metric(flat, 0.7, 1.0), [[1, 0], [0, 0.49]])


def test_metric_single_harmonic_at_right_angle():
    b = GaussianBump(0.4, 1.0)
    a1 = power_weighted(b, 1, 1.0)
    spec = PerturbationSpec(1.0, [Harmonic(1, a1)], b, check=False)
    g = perturbed_metric(spec, 0.7, math.pi / 2)
    fd = b.df(0.7)
    assert g[0, 1] == pytest.approx(-fd * a1.f(0.7), rel=1e-14)
    assert g[0, 0] == pytest.approx(1 + fd * fd, abs=1e-16)


def test_metric_against_embedding():
    # first-order metric from the embedding z = f + eps u, exact to O(eps^2)
    spec = gaussian_spec(eta=0.36, a1=1.3, a2=0.8, b1=2.0, b2=1.1, eps=1e-6).to_perturbation_spec(check=False)
    r, t = 0.9, 0.4
    surf = perturbed_graph_surface(spec)
    x, y = r * math.cos(t), r * math.sin(t)
    p, q = surf.gradient(np.array(x), np.array(y))
    # pull the Cartesian metric back to (r, phi)
    J = np.array([[math.cos(t), -r * math.sin(t)], [math.sin(t), r * math.cos(t)]])
    gxy = np.eye(2) + np.outer([p, q], [p, q])
    g_polar = J.T @ gxy @ J
    assert np.allclose(perturbed_metric(spec, r, t), g_polar, rtol=0, atol=1e-11)


def test_curvature_corrections_zero_harmonics():
    spec = PerturbationSpec(0.1, [], GaussianBump(1, 1))
    K, M = curvature_corrections(spec, 0.5, 0.3)
    assert K == 0 and M == 0


def test_curvature_corrections_flat_base():
    a = CallableProfile(lambda r: r * r * np.exp(-r * r), lambda r: (2 * r - 2 * r**3) * np.exp(-r * r),
                        lambda r: (2 - 10 * r * r + 4 * r**4) * np.exp(-r * r))
    spec = PerturbationSpec(0.01, [Harmonic(2, a)], FlatProfile(), check=False)
    r, t = 0.8, 0.3
    K, M = curvature_corrections(spec, r, t)
    expect = math.cos(2 * t) * (-4 * a.f(r) / (2 * r * r) + (a.df(r) + r * a.d2f(r)) / (2 * r))
    assert K == 0
    assert M == pytest.approx(expect, rel=1e-13)


@pytest.mark.parametrize("r,t", [(0.3, 0.2), (0.9, 1.4), (1.7, 2.9), (2.4, 4.0)])
def test_curvature_corrections_against_monge(r, t):
    base = GaussianBump(0.5, 1.0)
    spec = PerturbationSpec(0.0, [Harmonic(1, power_weighted(base, 1, 1.2), power_weighted(base, 1, 0.7)),
                                  Harmonic(2, power_weighted(base, 2, 0.9), power_weighted(base, 2, 1.5))],
                            base, check=False)
    x, y = np.array(r * math.cos(t)), np.array(r * math.sin(t))

    def curv(e):
        g = monge_patch_geometry(perturbed_graph_surface(spec, e), x, y)
        return np.array([g.K, g.M], dtype=float)

    def deriv(h):
        return (curv(h) - curv(-h)) / (2 * h)

    h1, h2 = 1e-3, 5e-4
    fd = (h1 * h1 * deriv(h2) - h2 * h2 * deriv(h1)) / (h1 * h1 - h2 * h2)
    K, M = curvature_corrections(spec, r, t)
    assert abs(K - fd[0]) <= 1e-5 * max(1.0, abs(fd[0]))
    assert abs(M - fd[1]) <= 1e-5 * max(1.0, abs(fd[1]))


def test_amplitude_trivial_cases():
    kin = ScatteringKinematics(1.0, 1.0)
    assert perturbation_amplitude(PerturbationSpec(0.01, [], GaussianBump(0.1, 1.0)), kin, THIN_LAYER) == 0
    g = GaussianBump(0.1, 1.0)
    flat = PerturbationSpec(0.01, [Harmonic(2, power_weighted(g, 2, 1.0))], FlatProfile(), check=False)
    # only the lambda-free term could survive and it carries f' as well
    assert abs(perturbation_amplitude(flat, kin, CurvatureCouplings(0.0, 0.0))) == 0


@pytest.mark.parametrize("theta", [0.0, 0.4, 1.3, 2.2, math.pi, 4.5])
@pytest.mark.parametrize("sk", [0.5, 1.2, 2.5])
def test_amplitude_matches_closed_form(theta, sk):
    ps = gaussian_spec()
    kin = ScatteringKinematics(sk, theta)
    fe = perturbation_amplitude(ps.to_perturbation_spec(), kin, THIN_LAYER)
    cf = perturbed_gaussian_amplitude_first_order(ps, kin, THIN_LAYER)
    assert abs(fe - cf) <= 2 * 0.01 * abs(cf)


@pytest.mark.parametrize("k,theta", [(0.7, 0.5), (1.2, 1.7), (1.5, math.pi), (0.9, 2.6), (2.0, 4.0)])
def test_amplitude_matches_oracle(k, theta):
    ps = gaussian_spec(eta=0.04, a1=1.3, a2=0.9, b1=0.8, b2=1.4)
    spec = ps.to_perturbation_spec()
    kin = ScatteringKinematics(k, theta)
    c = CurvatureCouplings(0.7, -0.3)
    fe = perturbation_amplitude(spec, kin, c)
    fo = perturbation_amplitude_oracle(spec, kin, c)
    assert abs(fe - fo) <= 1e-4 * abs(fo)


def test_amplitude_matches_oracle_forward():
    ps = gaussian_spec(eta=0.04, a1=1.3, a2=0.9, b1=0.8, b2=1.4)
    spec = ps.to_perturbation_spec()
    kin = ScatteringKinematics(1.1, 0.0)
    fe = perturbation_amplitude(spec, kin, THIN_LAYER)
    fo = perturbation_amplitude_oracle(spec, kin, THIN_LAYER)
    assert abs(fe - fo) <= 1e-4 * abs(fo)


def test_closed_form_forward_limit():
    ps = gaussian_spec(sigma=1.3, a2=0.7)
    k = 0.9
    val = perturbed_gaussian_amplitude_first_order(ps, ScatteringKinematics(k, 0.0), THIN_LAYER)
    expect = math.sqrt(math.pi / (2 * k)) * np.exp(-0.75j * math.pi) * (-(1.3**4) * k * k / (2 * 0.7**2)) * 0.01
    assert abs(val - expect) <= 1e-14 * abs(expect)


def test_closed_form_ignores_beta_and_vanishes_at_zero_eta():
    kin = ScatteringKinematics(1.1, 0.8)
    a = perturbed_gaussian_amplitude_first_order(gaussian_spec(b1=1.0, b2=2.0), kin, THIN_LAYER)
    b = perturbed_gaussian_amplitude_first_order(gaussian_spec(b1=0.3, b2=math.inf), kin, THIN_LAYER)
    assert a == b
    assert perturbed_gaussian_amplitude_first_order(gaussian_spec(eta=0.0), kin, THIN_LAYER) == 0


def test_z_factor_examples():
    ps = gaussian_spec(a1=1.0, a2=1.0)
    assert z_factors(ps, ScatteringKinematics(1.3, 0.0), THIN_LAYER)[1] == 0
    c = CurvatureCouplings(0.2, 0.0)
    for k, th in ((0.6, 0.5), (2.0, 2.0)):
        s2 = math.sin(th / 2) ** 2
        Z1, _ = z_factors(ps, ScatteringKinematics(k, th), c)
        assert Z1 == pytest.approx(2 * (1 - k * k * s2), rel=1e-14)


def test_z_factor_reconstruction_backward():
    ps = gaussian_spec()
    kin = ScatteringKinematics(1.0, math.pi)
    Z1, Z2 = z_factors(ps, kin, THIN_LAYER)
    assert math.isfinite(Z1)
    f = gaussian_amplitude_first_order(ps.bump, kin, THIN_LAYER)
    fe = perturbed_gaussian_amplitude_first_order(ps, kin, THIN_LAYER)
    assert abs(fe / f - (Z1 + 1j * Z2)) < 1e-10


def test_z_factor_singular():
    # lambda2 = 0 and 4 lambda1 s^2 = 1: the unperturbed bracket vanishes identically
    with pytest.raises(SingularConfigurationError):
        z_factors(gaussian_spec(), ScatteringKinematics(1.0, math.pi), CurvatureCouplings(0.25, 0.0))


def test_forward_z1_thin_layer():
    # with alpha2 = sigma the forward factor is 2 z/(1 + z), z = (sigma k)^2
    ps = gaussian_spec(a1=1.0, a2=1.0)
    sk = np.linspace(1, 4, 61)
    z1 = np.array([z_factors(ps, ScatteringKinematics(x, 0.0), THIN_LAYER)[0] for x in sk])
    assert np.allclose(z1, 2 * sk**2 / (1 + sk**2), rtol=1e-14)
    assert np.all(np.diff(z1) > 0)
    assert np.all(np.abs(z1) <= 2.0)


def test_perturbed_cross_section():
    ps = gaussian_spec(eps=0.0)
    kin = ScatteringKinematics(1.4, 0.9)
    f = gaussian_amplitude_first_order(ps.bump, kin, THIN_LAYER)
    assert perturbed_cross_section(ps, kin, THIN_LAYER) == differential_cross_section(f)
    eps = 1e-3
    ps = gaussian_spec(eps=eps)
    for k in (0.5, 1.0, 2.0):
        for th in (0.3, 1.5, 2.8):
            kin = ScatteringKinematics(k, th)
            f = gaussian_amplitude_first_order(ps.bump, kin, THIN_LAYER)
            fe = perturbed_gaussian_amplitude_first_order(ps, kin, THIN_LAYER)
            exact = differential_cross_section(f + eps * fe)
            lead = perturbed_cross_section(ps, kin, THIN_LAYER)
            Z1, Z2 = z_factors(ps, kin, THIN_LAYER)
            # the neglected term is eps^2 |f|^2 (Z1^2 + Z2^2)
            assert abs(exact - lead) <= 10 * eps**2 * differential_cross_section(f) * max(1.0, Z1**2 + Z2**2)


def test_spec_diagnostics():
    base = GaussianBump(1.0, 1.0)
    with pytest.warns(UserWarning, match="not small"):
        PerturbationSpec(0.5, [Harmonic(2, power_weighted(base, 2, 1.0))], base)
    bad = CallableProfile(lambda r: r * np.exp(-r * r), lambda r: (1 - 2 * r * r) * np.exp(-r * r),
                          lambda r: (4 * r**3 - 6 * r) * np.exp(-r * r))
    with pytest.warns(UserWarning, match="r\\^2"):
        PerturbationSpec(1e-6, [Harmonic(2, bad)], base)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gaussian_spec(eps=1e-3).to_perturbation_spec()
