import numpy as np
import pytest

from finslab.diffcore import ConstantField, FlatMetric, FunctionMetric
from finslab.finsler import (
    DegenerateFlag,
    EmptyDomain,
    Flag,
    admissible_points,
    constancy_scan,
    curvature_at,
    einstein_check,
    finsler_ricci,
    flag_curvature,
    fundamental_tensor,
    riemann_endomorphism,
    sample_flags,
    sample_pairs,
    spray_coefficients,
)
from finslab.killing import Dilation, U_s, V_r
from finslab.riemann import TaubNutMetric, christoffel, make_rng, sample_ball, sectional_curvature
from finslab.zermelo import NavigationData, RandersMetric, randers_from_navigation

X = np.array([0.2, -0.3, 0.1, 0.4])
Y = np.array([0.7, 0.1, -0.5, 0.3])
E1 = np.array([1.0, 0.0, 0.0, 0.0])


def vr_randers(a=1.0, r=1.0):
    nav = NavigationData(TaubNutMetric(a), V_r(r))
    return randers_from_navigation(nav), nav


def us_randers(a=1.0, s=0.25):
    nav = NavigationData(TaubNutMetric(a), U_s(s))
    return randers_from_navigation(nav), nav


def sphere():
    def comps(x):
        s = 1 + sum(c * c for c in x)
        f = 4 / (s * s)
        return [[f if i == j else 0.0 for j in range(4)] for i in range(4)]

    return FunctionMetric(comps)


# -- F^2 and g_y --------------------------------------------------------------


@pytest.mark.parametrize("lam", [0.5, 2.0, 7.0])
def test_F2_is_two_homogeneous(lam):
    F, _ = vr_randers()
    assert F.F2(X, lam * Y) == pytest.approx(lam**2 * F.F2(X, Y), rel=1e-13)


def test_fundamental_tensor_reproduces_F2():
    for F, _ in (vr_randers(), us_randers()):
        g = fundamental_tensor(F, X, Y)
        assert Y @ g @ Y == pytest.approx(F.F2(X, Y), rel=1e-12)
        assert np.linalg.eigvalsh(g).min() > 0


def test_fundamental_tensor_half_wind():
    F = randers_from_navigation(NavigationData(FlatMetric(), ConstantField([0.5, 0, 0, 0])))
    g = fundamental_tensor(F, np.zeros(4), E1)
    assert E1 @ g @ E1 == pytest.approx(4 / 9)


def test_fundamental_tensor_zero_homogeneous():
    F, _ = us_randers()
    np.testing.assert_allclose(fundamental_tensor(F, X, 3.0 * Y), fundamental_tensor(F, X, Y), atol=1e-12)


def test_zero_flagpole_rejected():
    F, _ = vr_randers()
    with pytest.raises(ValueError):
        fundamental_tensor(F, X, np.zeros(4))


# -- spray --------------------------------------------------------------------


def test_spray_vanishes_for_constant_wind_on_flat_space():
    F = randers_from_navigation(NavigationData(FlatMetric(), ConstantField([0.3, -0.2, 0.1, 0.0])))
    assert np.max(np.abs(spray_coefficients(F, X, Y))) < 1e-14
    assert np.max(np.abs(riemann_endomorphism(F, X, Y))) < 1e-13


def test_spray_is_two_homogeneous():
    F, _ = vr_randers()
    np.testing.assert_allclose(spray_coefficients(F, X, 2 * Y), 4 * spray_coefficients(F, X, Y), rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("metric", [TaubNutMetric(1.0), TaubNutMetric(5.0), sphere()], ids=["tn1", "tn5", "sphere"])
def test_riemannian_spray_is_half_christoffel(metric):
    F = RandersMetric(metric)
    Gamma = christoffel(metric, X)
    want = 0.5 * np.einsum("ijk,j,k->i", Gamma, Y, Y)
    assert np.max(np.abs(spray_coefficients(F, X, Y) - want)) < 1e-8


# -- Riemann curvature --------------------------------------------------------


def _relative(defect, scale):
    return float(np.max(np.abs(defect))) / max(1.0, float(np.max(np.abs(scale))))


@pytest.mark.parametrize("make", [vr_randers, us_randers])
def test_R_annihilates_y_and_is_self_adjoint(make):
    F, nav = make()
    for x, y in sample_pairs(nav, make_rng(21), 10):
        pt = curvature_at(F, x, y)
        assert _relative(pt.R @ y, pt.R) < 1e-9
        gR = pt.gy @ pt.R
        assert _relative(gR - gR.T, gR) < 1e-9


def test_flag_curvature_matches_sectional_for_riemannian():
    for metric in (TaubNutMetric(1.0), sphere()):
        F = RandersMetric(metric)
        rng = make_rng(22)
        for p in sample_ball(rng, 5, radius=0.8):
            y, u = rng.standard_normal((2, 4))
            K = flag_curvature(F, Flag(p, y, u))
            assert K == pytest.approx(sectional_curvature(metric, p, y, u), abs=1e-8)


def test_sphere_flag_curvature_is_one():
    F = RandersMetric(sphere())
    assert flag_curvature(F, Flag(X, Y, E1)) == pytest.approx(1.0, abs=1e-10)


def test_flag_curvature_depends_only_on_the_plane():
    F, _ = vr_randers()
    u = np.array([0.1, 0.9, 0.2, -0.4])
    K = flag_curvature(F, Flag(X, Y, u))
    assert flag_curvature(F, Flag(X, Y, u + 1.7 * Y)) == pytest.approx(K, rel=1e-8, abs=1e-10)
    assert flag_curvature(F, Flag(X, Y, -3.0 * u)) == pytest.approx(K, rel=1e-8, abs=1e-10)


def test_flag_curvature_zero_homogeneous_in_y():
    F, _ = us_randers()
    u = np.array([0.1, 0.9, 0.2, -0.4])
    K = flag_curvature(F, Flag(X, Y, u))
    assert flag_curvature(F, Flag(X, 2.5 * Y, u)) == pytest.approx(K, rel=1e-8, abs=1e-10)


def test_degenerate_flag_raises():
    F, _ = vr_randers()
    with pytest.raises(DegenerateFlag):
        flag_curvature(F, Flag(X, Y, 2 * Y))
    with pytest.raises(DegenerateFlag):
        flag_curvature(F, Flag(X, Y, np.zeros(4)))


def test_ricci_two_homogeneous():
    F, _ = vr_randers()
    assert finsler_ricci(F, X, 2 * Y) == pytest.approx(4 * finsler_ricci(F, X, Y), rel=1e-8, abs=1e-10)


# -- Einstein checks ----------------------------------------------------------


@pytest.mark.parametrize("make", [vr_randers, us_randers])
def test_killing_wind_on_taub_nut_is_ricci_flat(make):
    F, nav = make()
    rep = einstein_check(F, nav, sample_pairs(nav, make_rng(23), 10))
    assert abs(rep.c) < 1e-9
    assert abs(rep.K) < 1e-7
    assert rep.max_relative_residual < 1e-6
    assert rep.base_einstein_residual < 1e-8


def test_dilation_wind_is_einstein_with_negative_constant():
    kappa = 0.5
    nav = NavigationData(FlatMetric(), Dilation(-kappa))
    F = randers_from_navigation(nav)
    rep = einstein_check(F, nav, sample_pairs(nav, make_rng(24), 10, radius=1.5))
    assert rep.c == pytest.approx(kappa / 2, abs=1e-12)
    assert rep.K == pytest.approx(-(kappa**2) / 4, abs=1e-12)
    assert rep.max_relative_residual < 1e-9
    lo, hi, spread = constancy_scan(F, sample_flags(nav, make_rng(25), 10, radius=1.5))
    assert spread < 1e-9
    assert lo == pytest.approx(-(kappa**2) / 4, abs=1e-9)


def test_outside_domain_rejected():
    F, nav = vr_randers()
    with pytest.raises(EmptyDomain):
        einstein_check(F, nav, [(np.array([3.0, 0, 0, 0]), Y)])


# -- constancy scan and sampling ---------------------------------------------


def test_flat_scan_spread_is_zero():
    nav = NavigationData(FlatMetric(), ConstantField([0.3, -0.2, 0.1, 0.0]))
    F = randers_from_navigation(nav)
    assert constancy_scan(F, sample_flags(nav, make_rng(26), 20))[2] < 1e-9


def test_repeated_flag_has_zero_spread():
    F, _ = vr_randers()
    fl = Flag(X, Y, E1)
    assert constancy_scan(F, [fl] * 5)[2] == 0.0


def test_taub_nut_randers_flag_curvature_not_constant():
    F, nav = vr_randers()
    assert constancy_scan(F, sample_flags(nav, make_rng(27), 20))[2] > 1e-3


def test_admissible_points_respect_margin_and_seed():
    _, nav = vr_randers()
    a = admissible_points(nav, make_rng(28), 30)
    b = admissible_points(nav, make_rng(28), 30)
    np.testing.assert_array_equal(a, b)
    assert all(np.linalg.norm(p) <= 2.0 for p in a)


def test_admissible_points_empty_domain():
    _, nav = us_randers(s=100.0)
    with pytest.raises(EmptyDomain):
        admissible_points(nav, make_rng(29), 5, max_draws=500)
