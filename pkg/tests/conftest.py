import math
import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "src"))

from core.double_phase import DoubleHamiltonian, LindbladCoupling, PhaseVector, PolynomialHamiltonian  # noqa: E402
from settings.numerics import NumericsSettings  # noqa: E402
from states.initial_states import CatParams  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: varreduras do tamanho dos critérios de aceitação")


@pytest.fixture
def harmonic():
    return PolynomialHamiltonian.from_terms([(2, 0, 0.5), (0, 2, 0.5)])


@pytest.fixture
def cubic():
    return PolynomialHamiltonian.from_terms([(3, 0, 1.0)])


@pytest.fixture
def damped_coupling():
    """l′ = (0, 1)/√2, l″ = (1, 0)/√2: γ = ½."""
    s = math.sqrt(0.5)
    return LindbladCoupling(PhaseVector(0.0, s), PhaseVector(s, 0.0))


@pytest.fixture
def damped_harmonic(harmonic, damped_coupling):
    return DoubleHamiltonian(harmonic, damped_coupling)


@pytest.fixture
def cubic_model(cubic):
    return DoubleHamiltonian(cubic, LindbladCoupling.momentum(0.3))


@pytest.fixture
def quartic_model():
    return DoubleHamiltonian(PolynomialHamiltonian.from_terms([(0, 4, 0.25)]), LindbladCoupling.momentum(0.3))


@pytest.fixture
def cat():
    return CatParams(1.0, 0.0, 0.0, 2.0)


@pytest.fixture
def fast_numerics():
    return NumericsSettings(steps_per_unit=200)


@pytest.fixture
def tight_numerics():
    return NumericsSettings(steps_per_unit=400, shoot_tol=1e-12)
