import numpy as np
import pytest

from core.double_phase import (
    DoubleHamiltonian,
    LindbladCoupling,
    PhaseVector,
    PolynomialHamiltonian,
    apply_J,
    dissipation_coefficient,
    eval_complex_double_hamiltonian,
    eval_double_hamiltonian,
    grad_x_Hc,
    grad_y_Hc,
    hess_x_H,
    lambda_vector,
    wedge,
)
from core.errors import ConfigError


def test_wedge_examples():
    assert wedge((1, 0), (0, 1)) == 1
    assert wedge((2, 3), (2, 3)) == 0
    assert wedge((2, 3), (5, 7)) == -1


def test_wedge_is_antisymmetric_and_bilinear():
    rng = np.random.default_rng(7)
    a, b, c = rng.normal(size=(3, 2))
    assert wedge(a, b) == pytest.approx(-wedge(b, a))
    assert wedge(2.5 * a + c, b) == pytest.approx(2.5 * wedge(a, b) + wedge(c, b))


def test_apply_J():
    np.testing.assert_array_equal(apply_J(np.array([1.0, 2.0])), [-2.0, 1.0])


def test_dissipation_coefficient_and_lambda():
    c = LindbladCoupling(PhaseVector(0.0, 1.0), PhaseVector(1.0, 0.0))
    assert dissipation_coefficient(c) == pytest.approx(1.0)
    c = LindbladCoupling(PhaseVector(2.0, 0.0), PhaseVector(0.0, 3.0))
    assert dissipation_coefficient(c) == pytest.approx(-6.0)
    hermitian = LindbladCoupling.momentum(0.3)
    assert hermitian.gamma == 0.0
    np.testing.assert_allclose(lambda_vector(hermitian), [0.0, 0.3])


def test_non_finite_coupling_rejected():
    with pytest.raises(ConfigError) as info:
        LindbladCoupling.from_config({"l_re": [float("nan"), 0.0]})
    assert info.value.field == "coupling.l_re"


def test_hamiltonian_merges_terms_and_reports_degree():
    h = PolynomialHamiltonian.from_terms([(3, 0, 1.0), (3, 0, 1.0), (0, 1, 0.0)])
    assert len(h.terms) == 1
    assert h.degree == 3
    assert h.cubic_momentum_coefficient() == 2.0
    assert h.evaluate(np.array([2.0, 5.0])) == pytest.approx(16.0)


def test_hamiltonian_config_errors_name_the_field():
    with pytest.raises(ConfigError) as info:
        PolynomialHamiltonian.from_config([{"dp": 1, "dq": 0}])
    assert info.value.field == "hamiltonian[0].c"
    with pytest.raises(ConfigError):
        PolynomialHamiltonian.from_config([])


def test_quadratic_matrix(harmonic, cubic):
    np.testing.assert_allclose(harmonic.quadratic_matrix(), 0.5 * np.eye(2))
    assert cubic.quadratic_matrix() is None


def test_harmonic_double_hamiltonian_value(harmonic):
    dh = DoubleHamiltonian(harmonic, LindbladCoupling.zero())
    # 𝓗 = p y_q − q y_p
    assert eval_double_hamiltonian(dh, (1.0, 2.0), (0.5, -1.0)) == pytest.approx(-2.0)
    assert dh.value((1.0, 2.0), (0.0, 0.0)) == 0.0


def test_cubic_double_hamiltonian_closed_form(cubic_model):
    x = np.array([0.7 + 0.2j, -0.4])
    y = np.array([0.3, 1.1 - 0.1j])
    p, yq = x[0], y[1]
    expected = 3 * p ** 2 * yq + yq ** 3 / 4
    assert cubic_model.value(x, y) == pytest.approx(expected)
    deco = 0.5 * (0.3 * yq) ** 2
    assert eval_complex_double_hamiltonian(cubic_model, x, y) == pytest.approx(expected - 1j * deco)


def test_gradients_match_finite_differences(cubic, damped_coupling):
    dh = DoubleHamiltonian(
        PolynomialHamiltonian.from_terms([(3, 0, 1.0), (1, 2, -0.5), (0, 4, 0.25)]), damped_coupling
    )
    x = np.array([0.4 + 0.1j, -0.3 + 0.05j])
    y = np.array([0.2 - 0.1j, 0.8])
    h = 1e-6
    eye = np.eye(2)
    fd_x = np.array([(dh.complex_value(x + h * e, y) - dh.complex_value(x - h * e, y)) / (2 * h) for e in eye])
    fd_y = np.array([(dh.complex_value(x, y + h * e) - dh.complex_value(x, y - h * e)) / (2 * h) for e in eye])
    np.testing.assert_allclose(grad_x_Hc(dh, x, y), fd_x, atol=1e-8)
    np.testing.assert_allclose(grad_y_Hc(dh, x, y), fd_y, atol=1e-8)
    fd_h = np.array([(dh.grad_x(x + h * e, y) - dh.grad_x(x - h * e, y)) / (2 * h) for e in eye])
    np.testing.assert_allclose(hess_x_H(dh, x, y), fd_h.T, atol=1e-7)


def test_real_part_drops_lambda_terms(cubic_model):
    x, y = np.array([0.5, 0.1]), np.array([0.2, 1.0])
    real = cubic_model.real_part()
    assert not real.has_decoherence
    assert real.complex_value(x, y) == pytest.approx(cubic_model.value(x, y))
    assert real.deco_density(y) == pytest.approx(cubic_model.deco_density(y))
    np.testing.assert_allclose(real.grad_y_c(x, y), cubic_model.grad_y(x, y))


def test_vectorized_evaluation(cubic_model):
    xs = np.zeros((4, 3, 2))
    ys = np.ones((4, 3, 2))
    assert cubic_model.complex_value(xs, ys).shape == (4, 3)
    assert cubic_model.hess_x(xs, ys).shape == (4, 3, 2, 2)


def test_scaled_coupling_keeps_direction(damped_coupling):
    scaled = damped_coupling.scaled_to(2.0)
    assert scaled.strength == pytest.approx(2.0)
    assert scaled.gamma == pytest.approx(4.0 * damped_coupling.gamma)
    with pytest.raises(ConfigError):
        LindbladCoupling.zero().scaled_to(1.0)
