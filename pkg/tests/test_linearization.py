from types import SimpleNamespace

import numpy as np
import pytest

from dipbat import (DegenerateParametersError, PhysicalParams, StateSpaceModel, numeric_jacobian,
                    p_coefficients, paper_linear_model)
from dipbat.control import is_stable
from dipbat.linearization import jacobian_linear_model, model_discrepancy


def test_p_coefficients_unit_case(unit_params):
    pc = p_coefficients(unit_params)
    np.testing.assert_allclose(pc[:5], (3, 1, 2, 5, 1), atol=1e-12, rtol=0)
    assert pc.den == pytest.approx(1.0, abs=1e-12)


def test_massless_upper_link_is_degenerate():
    stub = SimpleNamespace(cart_mass=1.0, link1_mass=1.0, link2_mass=0.0, link1_length=1.0,
                           link2_length=1.0)
    with pytest.raises(DegenerateParametersError):
        p_coefficients(stub)


def test_p_coefficient_homogeneity(default_params):
    c = 2.5
    base = p_coefficients(default_params)
    scaled = p_coefficients(default_params.replace(
        cart_mass=c * default_params.cart_mass, link1_mass=c * default_params.link1_mass,
        link2_mass=c * default_params.link2_mass, link1_inertia=None, link2_inertia=None))
    np.testing.assert_allclose(scaled[:5], np.array(base[:5]) * c, rtol=1e-14)
    assert scaled.den == pytest.approx(base.den * c**3, rel=1e-13)


def test_paper_model_unit_case(unit_params):
    model = paper_linear_model(unit_params)
    assert model.A[3, 1] == pytest.approx(-30.0, abs=1e-12)
    assert np.all(model.A[3:, 3] == 0)
    assert np.all(model.A[:, 0] == 0)
    np.testing.assert_array_equal(model.A[:3], np.hstack([np.zeros((3, 3)), np.eye(3)]))
    np.testing.assert_array_equal(model.B[:3], 0)
    np.testing.assert_array_equal(model.C, np.eye(6))
    np.testing.assert_array_equal(model.D, np.zeros((6, 1)))


@pytest.mark.parametrize("params", [
    PhysicalParams(1, 1, 1, 1, 1, gravity=10.0),
    PhysicalParams(2.0, 0.3, 0.7, 0.8, 0.6, gravity=9.81),
])
def test_a63_hand_arithmetic(params):
    m1, m2, L1, L2 = params.link1_mass, params.link2_mass, params.link1_length, params.link2_length
    M = params.cart_mass + m1 + m2
    p1, p2, p3 = (m1 + 2 * m2) * L1, m2 * L2, 2 * m2 * L1 * L2
    p4, p5 = (m1 + 4 * m2) * L1 * L2, m2 * L1 * L1
    den = M * p4 * p5 + 2 * p1 * p2 * p3 - p2 * p2 * p4 - M * p3 * p3 - p1 * p1 * p5
    expected = (M * p4 - p1 * p1) * p2 * params.gravity / den
    assert paper_linear_model(params).A[5, 2] == pytest.approx(expected, rel=1e-14)


def test_jacobian_structure(default_params):
    A, B = numeric_jacobian(default_params)
    assert np.all(A[:, 0] == 0)
    np.testing.assert_array_equal(A[:3], np.hstack([np.zeros((3, 3)), np.eye(3)]))
    np.testing.assert_array_equal(B[:3], 0)


def test_jacobian_second_order_convergence(default_params):
    # Off-equilibrium, so the truncation term is visible above roundoff.
    x0 = np.array([0.0, 0.4, -0.3, 0.2, 0.8, -0.6])
    ref, _ = numeric_jacobian(default_params, x0, 0.5, step=1e-4)
    h = 0.05
    e1 = np.abs(numeric_jacobian(default_params, x0, 0.5, step=h)[0] - ref)
    e2 = np.abs(numeric_jacobian(default_params, x0, 0.5, step=h / 2)[0] - ref)
    mask = e1 > 1e-6
    assert mask.any()
    np.testing.assert_allclose(e1[mask] / e2[mask], 4.0, rtol=0.05)


def test_frictionless_jacobian_has_no_velocity_column():
    A, _ = numeric_jacobian(PhysicalParams(cart_friction=0.0))
    np.testing.assert_array_equal(A[3:, 3], 0)


def test_sparsity_agreement(default_params):
    paper = paper_linear_model(default_params)
    jac = jacobian_linear_model(default_params)
    np.testing.assert_array_equal(paper.A != 0, jac.A != 0)
    np.testing.assert_array_equal(paper.B != 0, jac.B != 0)
    assert model_discrepancy(default_params)["same_sparsity"]


@pytest.mark.parametrize("builder", [paper_linear_model, jacobian_linear_model])
def test_upright_is_unstable(default_params, builder):
    stable, alpha = is_stable(builder(default_params))
    assert not stable and alpha > 0


def test_paper_model_against_its_implied_geometry():
    # With equal half-lengths L, J = 0, centres of mass at L and a lower link of
    # full length 2L, the closed-form block reproduces the Lagrangian model in
    # the entries built from correct cofactors; the rest carry sign slips.
    L = 0.3
    params = PhysicalParams(1.0, 0.4, 0.4, 2 * L, L, link1_com=L, link2_com=L,
                            link1_inertia=0.0, link2_inertia=0.0)
    paper = paper_linear_model(params.replace(link1_length=L))
    jac = jacobian_linear_model(params)
    for i, j in [(3, 1), (3, 3), (4, 1), (4, 2), (5, 2)]:
        assert paper.A[i, j] == pytest.approx(jac.A[i, j], rel=1e-6)
    for i, j in [(4, 3), (5, 1)]:
        assert paper.A[i, j] == pytest.approx(-jac.A[i, j], rel=1e-6)
    assert paper.B[3, 0] == pytest.approx(jac.B[3, 0], rel=1e-6)
    assert paper.B[4, 0] == pytest.approx(-jac.B[4, 0], rel=1e-6)
    assert abs(paper.A[3, 2] - jac.A[3, 2]) > 1.0


def test_state_space_model_validation():
    with pytest.raises(ValueError):
        StateSpaceModel(np.zeros((2, 3)), np.zeros((2, 1)))
    with pytest.raises(ValueError):
        StateSpaceModel([[np.nan]], [[1.0]])
    m = StateSpaceModel([[0.0, 1.0], [0.0, 0.0]], [0.0, 1.0])
    assert m.B.shape == (2, 1) and m.order == 2
