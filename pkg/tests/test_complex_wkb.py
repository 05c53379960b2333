import numpy as np
import pytest

from core.double_phase import PhaseVector
from dynamics.action_cache import ActionCache
from dynamics.complex_wkb import ComplexWKBPropagator, chord_wkb, hj_residual
from dynamics.trajectories import PlaneWaveAction
from reference.oracles import QuadraticModel, exact_cubic_cat_chord, exact_cubic_mixed_propagator, exact_quadratic_chord
from settings.numerics import NumericsSettings
from states.initial_states import CatParams, StateSpec


def _grid(extent, n):
    axis = np.linspace(-extent, extent, n)
    yp, yq = np.meshgrid(axis, axis, indexing="ij")
    return np.stack([yp, yq], axis=-1)


def test_quadratic_model_is_exact(damped_harmonic, harmonic, damped_coupling, fast_numerics):
    state = StateSpec.from_config({"type": "gaussian", "P": 0.5, "Q": -0.3})
    model = QuadraticModel.from_hamiltonian(harmonic, damped_coupling)
    propagator = ComplexWKBPropagator(damped_harmonic, 1.0, fast_numerics)
    ys = _grid(3.0, 7)
    for t in (0.1, 0.5, 1.0):
        wkb = propagator.state_chord(state, ys, t)
        exact = exact_quadratic_chord(model, lambda y: state.chord0(y, 1.0), ys, t, 1.0)
        np.testing.assert_allclose(wkb, exact, rtol=1e-6)


def test_van_vleck_prefactor_is_one_for_quadratic(damped_harmonic, fast_numerics):
    s0 = CatParams(0.5, -0.3).gaussian().initial_action()
    ys = _grid(2.0, 3)
    unit = ComplexWKBPropagator(damped_harmonic, 1.0, fast_numerics).chord(s0, ys, 0.7)
    vv_numerics = NumericsSettings(steps_per_unit=200, prefactor="van_vleck")
    vv = ComplexWKBPropagator(damped_harmonic, 1.0, vv_numerics).chord(s0, ys, 0.7)
    np.testing.assert_allclose(vv.prefactor, 1.0, atol=1e-7)
    np.testing.assert_allclose(vv.value, unit.value, rtol=1e-7)


def test_cubic_cat_phase_is_exact(cubic_model, cat, fast_numerics):
    hbar = 0.1
    ys = _grid(1.5, 5)
    for term in ("aa", "ab", "ba"):
        params = cat.term(term)
        s0 = params.gaussian().initial_action()
        for t in (0.2, 1.0):
            wkb = chord_wkb(cubic_model, s0, ys, t, hbar, fast_numerics).value
            exact = exact_cubic_cat_chord(params, 0.3, ys, t, hbar)
            amplitude = np.sqrt(1.0 + 3j * t * ys[..., 1])
            np.testing.assert_allclose(wkb, exact * amplitude, rtol=1e-6)


def test_van_vleck_cubic_cat_matches_exact_value(cubic_model, cat):
    hbar = 0.1
    numerics = NumericsSettings(steps_per_unit=200, prefactor="van_vleck")
    s0 = cat.gaussian().initial_action()
    ys = _grid(1.5, 5)
    wkb = chord_wkb(cubic_model, s0, ys, 1.0, hbar, numerics).value
    np.testing.assert_allclose(wkb, exact_cubic_cat_chord(cat, 0.3, ys, 1.0, hbar), rtol=1e-6)


def test_plane_wave_matches_mixed_propagator(cubic_model, fast_numerics):
    x = PhaseVector(0.7, -0.4)
    ys = _grid(1.0, 4)
    value = chord_wkb(cubic_model, PlaneWaveAction(x), ys, 0.6, 1.0, fast_numerics).value
    np.testing.assert_allclose(value, exact_cubic_mixed_propagator(x, 0.3, ys, 0.6, 1.0), rtol=1e-8)


def test_trace_is_preserved(cubic_model, cat, fast_numerics):
    state = StateSpec.from_config({"type": "cat", "P": 1.0, "Q": 0.0, "dP": 0.0, "dQ": 2.0})
    propagator = ComplexWKBPropagator(cubic_model, 0.1, fast_numerics)
    at_zero = propagator.state_chord(state, np.zeros(2), 0.0)
    assert at_zero == pytest.approx(1.0, abs=1e-12)
    for t in (0.25, 1.0):
        assert propagator.state_chord(state, np.zeros(2), t) == pytest.approx(at_zero, abs=1e-10)


def test_cache_reuses_solved_nodes(cubic_model, cat, fast_numerics):
    cache = ActionCache()
    propagator = ComplexWKBPropagator(cubic_model, 0.1, fast_numerics, cache=cache)
    s0 = cat.gaussian().initial_action()
    ys = _grid(1.0, 3)
    first = propagator.chord(s0, ys, 0.5).value
    assert len(cache) == 9
    second = propagator.chord(s0, ys, 0.5).value
    assert cache.hits == 9
    np.testing.assert_array_equal(first, second)


def test_results_do_not_depend_on_thread_count(cubic_model, cat):
    numerics = NumericsSettings(steps_per_unit=100, chunk_size=4)
    s0 = cat.gaussian().initial_action()
    ys = _grid(1.0, 5)
    serial = ComplexWKBPropagator(cubic_model, 0.1, numerics, threads=1).chord(s0, ys, 0.5).value
    pooled = ComplexWKBPropagator(cubic_model, 0.1, numerics, threads=4).chord(s0, ys, 0.5).value
    np.testing.assert_array_equal(serial, pooled)


def test_hamilton_jacobi_residual_plane_wave(cubic_model, tight_numerics):
    s0 = PlaneWaveAction(PhaseVector(0.4, 0.1))
    rng = np.random.default_rng(2)
    for _ in range(20):
        y = rng.uniform(-1.0, 1.0, size=2)
        t = float(rng.uniform(0.05, 1.0))
        assert hj_residual(cubic_model, s0, y, t, 1.0, h=1e-4, numerics=tight_numerics) <= 1e-6


def test_hamilton_jacobi_residual_gaussian(damped_harmonic, tight_numerics):
    s0 = CatParams(0.5, -0.3).gaussian().initial_action()
    rng = np.random.default_rng(8)
    for _ in range(20):
        y = rng.uniform(-2.0, 2.0, size=2)
        t = float(rng.uniform(0.05, 1.0))
        assert hj_residual(damped_harmonic, s0, y, t, 1.0, h=1e-4, numerics=tight_numerics) <= 1e-6


def test_propagator_rejects_non_positive_hbar(cubic_model):
    with pytest.raises(ValueError):
        ComplexWKBPropagator(cubic_model, 0.0)


def test_full_cat_chord_is_hermitian(cubic_model, fast_numerics):
    state = StateSpec.from_config({"type": "cat", "P": 1.0, "Q": 0.0, "dP": 0.0, "dQ": 2.0})
    propagator = ComplexWKBPropagator(cubic_model, 0.1, fast_numerics)
    ys = _grid(1.5, 5)
    for t in (0.3, 1.0):
        forward = propagator.state_chord(state, ys, t)
        backward = propagator.state_chord(state, -ys, t)
        np.testing.assert_allclose(backward, np.conj(forward), rtol=1e-7, atol=1e-12)


def test_doubling_rk4_steps_leaves_chords_unchanged(damped_harmonic, quartic_model):
    coarse, fine = NumericsSettings(steps_per_unit=500), NumericsSettings(steps_per_unit=1000)
    ys = _grid(1.0, 3)
    s0 = CatParams(0.5, -0.3).gaussian().initial_action()
    a = chord_wkb(damped_harmonic, s0, ys, 0.7, 1.0, coarse).value
    b = chord_wkb(damped_harmonic, s0, ys, 0.7, 1.0, fine).value
    assert np.max(np.abs(a - b)) < 1e-8
    s0 = PlaneWaveAction(PhaseVector(0.2, 0.4))
    a = chord_wkb(quartic_model, s0, ys, 0.5, 1.0, coarse).value
    b = chord_wkb(quartic_model, s0, ys, 0.5, 1.0, fine).value
    assert np.max(np.abs(a - b)) < 1e-8
