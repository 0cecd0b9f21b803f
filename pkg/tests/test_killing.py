import itertools

import numpy as np
import pytest

from finslab.diffcore import FlatMetric
from finslab.killing import (
    Dilation,
    EuclideanKilling,
    TaubNutKillingParams,
    U_s,
    UnderdeterminedSampling,
    V_r,
    W_mn,
    build_field,
    classify_killing,
    hopf_dual_field,
    hopf_pde_system,
    lie_derivative_oneform,
    pattern_basis,
    pattern_residual,
)
from finslab.riemann import TaubNutMetric, hopf_form, killing_residual, make_rng, sample_ball

X0 = np.array([0.3, -1.1, 0.7, 1.9])


def test_vr_components():
    np.testing.assert_allclose(V_r(2.0)(X0), 2.0 * np.array([X0[3], -X0[2], X0[1], -X0[0]]))


def test_us_components():
    np.testing.assert_allclose(U_s(-1.5)(X0), -1.5 * np.array([X0[2], X0[3], -X0[0], -X0[1]]))


def test_wmn_components():
    m, n = 0.4, -2.0
    np.testing.assert_allclose(W_mn(m, n)(X0), [m * X0[1], -m * X0[0], n * X0[3], -n * X0[2]])


def test_hopf_dual_field_is_omega():
    np.testing.assert_allclose(hopf_dual_field()(X0), hopf_form(X0))


def test_build_field_jacobian_is_Q_everywhere():
    params = TaubNutKillingParams(m=1.0, n=2.0, r=3.0, s=4.0)
    X = build_field(params)
    for p in sample_ball(make_rng(1), 5):
        np.testing.assert_array_equal(X.jacobian(p), params.matrix())
    assert not np.any(X.C)


def test_euclidean_killing_requires_antisymmetry():
    with pytest.raises(ValueError):
        EuclideanKilling(np.eye(4))


def test_coefficient_roundtrip():
    c = make_rng(2).standard_normal(10)
    np.testing.assert_array_equal(EuclideanKilling.from_coefficients(c).coefficients(), c)


# -- Lie derivative of omega --------------------------------------------------


def test_vr_preserves_omega():
    for p in sample_ball(make_rng(3), 10):
        assert np.max(np.abs(lie_derivative_oneform(V_r(1.3), p))) < 1e-14


def test_translation_moves_omega():
    X = EuclideanKilling(np.zeros((4, 4)), np.array([1.0, 0, 0, 0]))
    np.testing.assert_array_equal(lie_derivative_oneform(X, [1, 0, 0, 0]), [0, 1, 0, 0])


def test_dilation_scales_omega():
    np.testing.assert_allclose(lie_derivative_oneform(Dilation(), X0), 2 * np.array(hopf_form(X0)))


def test_pde_system_oracle_matches_cartan_formula():
    rng = make_rng(4)
    for _ in range(20):
        X = EuclideanKilling.from_coefficients(rng.standard_normal(10))
        p = rng.standard_normal(4)
        np.testing.assert_allclose(lie_derivative_oneform(X, p), hopf_pde_system(X, p), atol=1e-13)
    np.testing.assert_allclose(lie_derivative_oneform(Dilation(), X0), hopf_pde_system(Dilation(), X0), atol=1e-13)


# -- the 4-parameter family ---------------------------------------------------


def test_grid_of_parameters_is_killing():
    g = TaubNutMetric(1.0)
    pts = sample_ball(make_rng(5), 20)
    for m, n, r, s in itertools.product([-2.0, 0.5, 2.0], repeat=4):
        X = build_field(TaubNutKillingParams(m, n, r, s))
        assert killing_residual(X, g, pts) < 1e-9


def test_fields_outside_the_family_are_not_killing():
    g = TaubNutMetric(1.0)
    pts = sample_ball(make_rng(6), 20)
    rng = make_rng(7)
    for _ in range(5):
        C = rng.standard_normal(4)
        X = EuclideanKilling(np.zeros((4, 4)), C / np.linalg.norm(C))
        assert killing_residual(X, g, pts) > 1e-3
    Q = np.zeros((4, 4))
    Q[0, 2], Q[2, 0] = 1.0, -1.0  # Q13 = 1, Q24 = 0
    assert killing_residual(EuclideanKilling(Q), g, pts) > 1e-3
    Q = np.zeros((4, 4))
    Q[0, 3], Q[3, 0] = 1.0, -1.0  # Q14 = 1, Q23 = 0
    assert killing_residual(EuclideanKilling(Q), g, pts) > 1e-3


def test_preserving_omega_iff_killing():
    g = TaubNutMetric(1.0)
    rng = make_rng(8)
    pts = sample_ball(rng, 10)
    P = pattern_basis()
    agree = set()
    for k in range(50):
        if k % 2:
            coeffs = rng.standard_normal(4) @ P  # in the family, C = 0
        else:
            coeffs = rng.standard_normal(10)
        X = EuclideanKilling.from_coefficients(coeffs)
        preserves = max(np.max(np.abs(lie_derivative_oneform(X, p))) for p in pts) < 1e-9
        killing = killing_residual(X, g, pts) < 1e-9
        assert preserves == killing
        agree.add(preserves)
    assert agree == {True, False}


# -- classification -----------------------------------------------------------


def test_classify_flat_gives_full_family():
    assert classify_killing(FlatMetric(), sample_ball(make_rng(9), 20)).dimension == 10


@pytest.mark.parametrize("a", [0.1, 1.0, 5.0])
def test_classify_taub_nut_gives_four_parameter_family(a):
    result = classify_killing(TaubNutMetric(a), sample_ball(make_rng(10), 20))
    assert result.dimension == 4
    assert result.pattern_residual < 1e-9
    assert np.max(np.abs(result.basis[:, 6:])) < 1e-9
    for v in result.basis:
        Q = EuclideanKilling.from_coefficients(v).Q
        assert abs(Q[0, 2] - Q[1, 3]) < 1e-9
        assert abs(Q[0, 3] + Q[1, 2]) < 1e-9


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_classification_independent_of_seed(seed):
    assert classify_killing(TaubNutMetric(1.0), seed=seed).dimension == 4


def test_single_point_is_underdetermined():
    with pytest.raises(UnderdeterminedSampling):
        classify_killing(TaubNutMetric(1.0), [np.zeros(4)])


def test_degenerate_sample_is_enlarged_or_rejected():
    # ten copies of the origin: every coefficient looks Killing there
    pts = np.zeros((10, 4))
    result = classify_killing(TaubNutMetric(1.0), pts, seed=3)
    assert result.dimension == 4
    assert result.n_points > 10
    with pytest.raises(UnderdeterminedSampling):
        classify_killing(TaubNutMetric(1.0), pts, max_points=10)


def test_pattern_residual_flags_foreign_vectors():
    assert pattern_residual(pattern_basis()) < 1e-15
    e = np.zeros(10)
    e[6] = 1.0
    assert pattern_residual(e) == pytest.approx(1.0)
