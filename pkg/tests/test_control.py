import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import place_poles as scipy_place_poles
from sklearn.base import clone

from dipbat import (ConfigurationError, PolePlacementController, StateSpaceModel, SynthesisError,
                    closed_loop, controllability_rank, is_stable, pade_augment, paper_linear_model,
                    place_poles, poles_from_spec)
from dipbat.linearization import jacobian_linear_model

DOUBLE_INTEGRATOR = StateSpaceModel([[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]])


def random_system(rng, n):
    return StateSpaceModel(rng.normal(size=(n, n)), rng.normal(size=(n, 1)))


def random_poles(rng, n):
    poles = []
    while len(poles) < n:
        if n - len(poles) >= 2 and rng.uniform() < 0.5:
            re, im = -rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0)
            poles += [complex(re, im), complex(re, -im)]
        else:
            poles.append(complex(-rng.uniform(0.2, 3.0)))
    return np.array(poles)


def max_relative_pole_error(A_cl, poles):
    got = np.linalg.eigvals(A_cl)
    return max(np.min(np.abs(got - p)) / abs(p) for p in poles)


def test_poles_critical_damping():
    np.testing.assert_allclose(poles_from_spec(1.0, 1.0, 2), [-1, -1])


def test_poles_published_design_point():
    poles = poles_from_spec(0.4431, 0.9248, 2)
    np.testing.assert_allclose(poles, [-0.40977888 + 0.82905j, -0.40977888 - 0.82905j], atol=5e-5)


def test_poles_order_four():
    poles = poles_from_spec(0.5, 2.0, 4)
    np.testing.assert_allclose(poles, [-1 + np.sqrt(3) * 1j, -1 - np.sqrt(3) * 1j, -3, -4],
                               atol=1e-12)


def test_poles_overdamped():
    poles = poles_from_spec(1.25, 2.0, 3)
    np.testing.assert_allclose(poles, [-1.0, -4.0, -7.5], atol=1e-12)


@pytest.mark.parametrize("zeta, omega", [(0.0, 1.0), (-0.3, 1.0), (0.5, 0.0)])
def test_poles_invalid(zeta, omega):
    with pytest.raises(ConfigurationError):
        poles_from_spec(zeta, omega, 4)


@given(st.floats(0.01, 3.0), st.floats(0.05, 10.0), st.integers(2, 9))
def test_poles_conjugate_closed_and_stable(zeta, omega, order):
    poles = poles_from_spec(zeta, omega, order)
    assert poles.size == order
    assert np.all(poles.real < 0)
    np.testing.assert_allclose(np.sort_complex(poles), np.sort_complex(poles.conj()), atol=1e-12)


@pytest.mark.parametrize("model, rank", [
    (DOUBLE_INTEGRATOR, 2),
    (StateSpaceModel(np.eye(2), [[1.0], [0.0]]), 1),
])
def test_controllability_rank_small(model, rank):
    assert controllability_rank(model) == rank


@pytest.mark.parametrize("builder", [paper_linear_model, jacobian_linear_model])
def test_pendulum_is_controllable(default_params, builder):
    assert controllability_rank(builder(default_params)) == 6


@pytest.mark.parametrize("delay", [0.02, 0.2, 2.0])
def test_augmented_pendulum_is_controllable(default_params, delay):
    assert controllability_rank(pade_augment(jacobian_linear_model(default_params), delay)) == 7


def test_place_scalar():
    K = place_poles(StateSpaceModel([[0.0]], [[1.0]]), [-2.0])
    np.testing.assert_allclose(K, [2.0])


def test_place_double_integrator():
    K = place_poles(DOUBLE_INTEGRATOR, [-1.0, -1.0])
    np.testing.assert_allclose(K, [1.0, 2.0], atol=1e-12)


def test_place_rejects_uncontrollable():
    with pytest.raises(SynthesisError):
        place_poles(StateSpaceModel(np.eye(2), [[1.0], [0.0]]), [-1.0, -2.0])


def test_place_rejects_non_conjugate_set():
    with pytest.raises(ConfigurationError):
        place_poles(DOUBLE_INTEGRATOR, [-1 + 1j, -2.0])


def test_place_rejects_wrong_count():
    with pytest.raises(ConfigurationError):
        place_poles(DOUBLE_INTEGRATOR, [-1.0])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 7))
def test_placement_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    model = random_system(rng, n)
    poles = random_poles(rng, n)
    K = place_poles(model, poles)
    assert max_relative_pole_error(closed_loop(model, K).A, poles) < 1e-6


def test_placement_agrees_with_scipy(rng):
    # Independent route: Tits-Yang in scipy (distinct poles, SISO => same unique K).
    for _ in range(20):
        n = int(rng.integers(2, 7))
        model = random_system(rng, n)
        poles = -np.arange(1, n + 1) * rng.uniform(0.5, 1.5)
        ours = place_poles(model, poles)
        theirs = scipy_place_poles(model.A, model.B, poles).gain_matrix.ravel()
        np.testing.assert_allclose(ours, theirs, rtol=1e-6, atol=1e-9)


def test_gain_continuity(default_params):
    model = jacobian_linear_model(default_params)
    K0 = place_poles(model, poles_from_spec(0.6, 2.0, 6))
    K1 = place_poles(model, poles_from_spec(0.6 + 1e-9, 2.0, 6))
    K2 = place_poles(model, poles_from_spec(0.6, 2.0 + 1e-9, 6))
    assert np.max(np.abs(K1 - K0)) < 1e-6 * max(1.0, np.max(np.abs(K0)))
    assert np.max(np.abs(K2 - K0)) < 1e-6 * max(1.0, np.max(np.abs(K0)))


def test_closed_loop_zero_gain():
    model = StateSpaceModel([[1.0, 2.0], [3.0, 4.0]], [[0.0], [1.0]])
    np.testing.assert_array_equal(closed_loop(model, [0.0, 0.0]).A, model.A)


def test_closed_loop_scalar():
    np.testing.assert_array_equal(closed_loop(StateSpaceModel([[0.0]], [[1.0]]), [2.0]).A, [[-2.0]])


def test_closed_loop_substitution_columns(default_params, rng):
    model = pade_augment(jacobian_linear_model(default_params), 0.2)
    K = rng.normal(size=7)
    plain = closed_loop(model, K).A
    wired = closed_loop(model, K, delayed_channel_substitution=True).A
    b = model.B[:, 0]
    np.testing.assert_allclose(wired[:, 6] - plain[:, 6], -b * K[0], atol=1e-12)
    np.testing.assert_allclose(wired[:, 0], model.A[:, 0] + b * K[0], atol=1e-12)
    np.testing.assert_allclose(wired[:, 1:6], plain[:, 1:6], atol=1e-12)


def test_closed_loop_dimension_mismatch():
    with pytest.raises(ConfigurationError):
        closed_loop(DOUBLE_INTEGRATOR, [1.0, 2.0, 3.0])


@pytest.mark.parametrize("A, stable, alpha", [
    (np.diag([-1.0, -2.0]), True, -1.0),
    ([[0.0, 1.0], [0.0, 0.0]], False, 0.0),
])
def test_is_stable(A, stable, alpha):
    got = is_stable(StateSpaceModel(A, np.zeros((2, 1))))
    assert got[0] is stable or got[0] == stable
    assert got[1] == pytest.approx(alpha)


def test_open_loop_pendulum_unstable(default_params):
    assert not is_stable(paper_linear_model(default_params))[0]


class TestPolePlacementController:
    def test_get_params_and_clone(self):
        ctrl = PolePlacementController(zeta=0.4, omega_n=1.3)
        params = ctrl.get_params()
        assert params["zeta"] == 0.4 and params["omega_n"] == 1.3
        assert clone(ctrl).get_params() == params

    def test_fit_places_requested_poles(self, default_params):
        model = jacobian_linear_model(default_params)
        ctrl = PolePlacementController(0.7, 2.0).fit(model)
        assert max_relative_pole_error(ctrl.closed_loop_.A, ctrl.poles_) < 1e-6
        assert ctrl.is_stable_

    def test_predict_is_negative_feedback(self, default_params):
        ctrl = PolePlacementController(0.7, 2.0).fit(jacobian_linear_model(default_params))
        X = np.eye(6)
        np.testing.assert_allclose(ctrl.predict(X), -ctrl.gain_)

    def test_predict_uses_delayed_measurement(self, default_params):
        model = pade_augment(jacobian_linear_model(default_params), 0.2)
        ctrl = PolePlacementController(0.7, 2.0).fit(model)
        # Cart at 1 with the filter at rest there (x7 = 2): x_m = 1, same as undelayed.
        x = np.array([1.0, 0, 0, 0, 0, 0, 2.0])
        K = ctrl.gain_
        assert ctrl.predict(x)[0] == pytest.approx(-(K[0] * 1.0 + K[6] * 2.0))

    def test_pade_delay_pole(self, default_params):
        model = pade_augment(jacobian_linear_model(default_params), 0.2)
        ctrl = PolePlacementController(0.5, 1.0).fit(model)
        assert ctrl.poles_[-1] == pytest.approx(-10.0)
        spaced = PolePlacementController(0.5, 1.0, delay_pole="spaced").fit(model)
        assert spaced.poles_[-1] == pytest.approx(-7 * 0.5)

    def test_pade_pole_equals_undelayed_design_on_delayed_measurement(self, default_params):
        plant = jacobian_linear_model(default_params)
        model = pade_augment(plant, 0.2)
        ctrl = PolePlacementController(0.8, 1.5).fit(model)
        K6 = PolePlacementController(0.8, 1.5).fit(plant).gain_
        reference = closed_loop(model, np.append(K6, 0.0), delayed_channel_substitution=True)
        np.testing.assert_allclose(ctrl.closed_loop_.A, reference.A, rtol=1e-6, atol=1e-6)

    def test_unfitted_predict_raises(self):
        from sklearn.exceptions import NotFittedError
        with pytest.raises(NotFittedError):
            PolePlacementController().predict(np.zeros((1, 6)))
