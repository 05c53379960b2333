import numpy as np
import pytest

from core.double_phase import ComplexPhaseVector, PhaseVector, as_vector
from core.errors import ConfigError
from states.initial_states import (
    CatParams,
    CatState,
    GaussianState,
    GaussianWigner,
    StateSpec,
    cat_initial_action,
    gaussian_initial_action,
    gaussian_wigner,
    plane_wave_action,
)


def test_cat_terms_map_to_coherent_states(cat):
    aa, bb = cat.term("aa"), cat.term("bb")
    assert (aa.P, aa.Q, aa.dP, aa.dQ) == (1.0, -1.0, 0.0, 0.0)
    assert (bb.P, bb.Q) == (1.0, 1.0)
    assert cat.term("ab") is cat
    ba = cat.term("ba")
    assert (ba.dP, ba.dQ) == (0.0, -2.0)
    with pytest.raises(ConfigError) as info:
        cat.term("cc")
    assert info.value.field == "state.term"


def test_overlap_is_the_ab_chord_at_origin(cat):
    hbar = 0.1
    expected = np.exp(-1j * 1.0 * 2.0 / hbar - 4.0 / (4 * hbar))
    assert cat.overlap(hbar) == pytest.approx(expected)
    action = cat_initial_action(cat)
    assert np.exp(1j * action.value(np.zeros(2)) / hbar) == pytest.approx(expected)


def test_full_cat_has_unit_trace(cat):
    state = StateSpec.from_config({"type": "cat", "P": 1.0, "Q": 0.0, "dP": 0.0, "dQ": 2.0})
    assert len(state.components(0.1)) == 4
    assert state.chord0(np.zeros(2), 0.1) == pytest.approx(1.0, abs=1e-12)


def test_initial_action_reproduces_gaussian_chord():
    g = GaussianWigner(PhaseVector(0.4, -0.7), np.array([0.3, -1.1]), phase0=0.25)
    s0 = g.initial_action()
    rng = np.random.default_rng(9)
    ys = rng.uniform(-2.0, 2.0, size=(6, 2))
    hbar = 0.3
    np.testing.assert_allclose(np.exp(1j * s0.value(ys) / hbar), g.chord(ys, hbar), rtol=1e-12)


def test_gaussian_wigner_is_normalised_and_matches_chord():
    hbar = 0.2
    g = CatParams(0.5, -0.2, 0.4, 0.6).gaussian()
    axis = np.linspace(-4.0, 4.0, 321)
    step = axis[1] - axis[0]
    pp, qq = np.meshgrid(axis, axis, indexing="ij")
    w = g.value(np.stack([pp, qq], axis=-1), hbar)
    y = np.array([0.3, -0.5])
    integral = np.sum(w * np.exp(-1j * (y[0] * pp + y[1] * qq) / hbar)) * step ** 2
    assert integral == pytest.approx(complex(g.chord(y, hbar)), abs=1e-9)
    coherent = GaussianWigner(PhaseVector(0.0, 0.0), np.zeros(2))
    assert np.sum(coherent.value(np.stack([pp, qq], axis=-1), hbar)) * step ** 2 == pytest.approx(1.0)


def test_full_cat_wigner_is_real(cat):
    state = StateSpec.from_config({"type": "cat", "P": 1.0, "Q": 0.0, "dQ": 2.0})
    w = state.wigner0(np.array([[1.0, 0.0], [0.5, 0.3]]), 0.1)
    assert not np.iscomplexobj(w)
    # franjas: W < 0 em algum ponto entre os dois pacotes
    ps = np.linspace(0.7, 1.3, 61)
    fringe = state.wigner0(np.stack([ps, np.zeros_like(ps)], axis=-1), 0.1)
    assert np.min(fringe) < 0.0


def test_state_config_round_trip():
    for fragment in (
        {"type": "cat", "P": 1.0, "Q": 0.0, "dP": 0.0, "dQ": 2.0, "term": "ab"},
        {"type": "gaussian", "P": 0.5, "Q": -0.3},
        {"type": "plane_wave", "p": 0.0, "q": 0.3},
    ):
        assert StateSpec.from_config(fragment).to_config() == fragment


def test_state_config_errors_name_the_field():
    cases = [
        ({"type": "squeezed"}, "state.type"),
        ({"type": "cat", "Q": 0.0}, "state.P"),
        ({"type": "cat", "P": 1.0, "Q": 0.0, "term": "xy"}, "state.term"),
        ({"type": "plane_wave", "p": 0.0}, "state.q"),
        ({"type": "gaussian", "P": "um", "Q": 0.0}, "state.P"),
        ({"type": "cat", "P": 1.0, "Q": float("inf")}, "state.Q"),
    ]
    for fragment, field in cases:
        with pytest.raises(ConfigError) as info:
            StateSpec.from_config(fragment)
        assert info.value.field == field


def test_plane_wave_state_has_no_regular_wigner():
    state = StateSpec.from_config({"type": "plane_wave", "p": 0.2, "q": 0.3})
    assert state.is_real
    assert state.components(1.0)[0].wigner is None
    with pytest.raises(ValueError):
        state.wigner0(np.zeros(2), 1.0)
    y = np.array([0.5, -0.4])
    assert state.chord0(y, 1.0) == pytest.approx(np.exp(-1j * (0.2 * 0.5 - 0.3 * 0.4)))


def test_initial_actions_have_non_negative_imaginary_part():
    axis = np.linspace(-5.0, 5.0, 41)
    yp, yq = np.meshgrid(axis, axis, indexing="ij")
    ys = np.stack([yp, yq], axis=-1)
    hbar = 0.1
    for fragment in (
        {"type": "cat", "P": 1.0, "Q": 0.0, "dP": 0.0, "dQ": 2.0},
        {"type": "cat", "P": 0.3, "Q": -0.2, "dP": 1.5, "dQ": -0.5},
        {"type": "gaussian", "P": 0.5, "Q": -0.3},
        {"type": "plane_wave", "p": 0.2, "q": 0.7},
    ):
        for component in StateSpec.from_config(fragment).components(hbar):
            assert np.all(np.imag(component.action.value(ys)) >= -1e-12)
            assert np.all(np.abs(component.chord0(ys, hbar)) <= abs(component.weight) * (1 + 1e-12))


def test_cat_state_terms_and_chord(cat):
    hbar = 0.1
    full = CatState(cat, hbar)
    labels = [label for label, _, _ in full.terms()]
    assert labels == ["aa", "bb", "ab", "ba"]
    assert full.chord(np.zeros(2)) == pytest.approx(1.0, abs=1e-12)
    y = np.array([0.3, -1.7])
    assert full.chord(-y) == pytest.approx(np.conj(full.chord(y)), abs=1e-12)
    spec = StateSpec.from_config({"type": "cat", "P": 1.0, "Q": 0.0, "dP": 0.0, "dQ": 2.0})
    assert full.chord(y) == pytest.approx(spec.chord0(y, hbar), abs=1e-12)

    single = CatState(cat, hbar, term="ab")
    assert single.terms() == (("ab", 1.0, cat),)
    assert single.chord(np.zeros(2)) == pytest.approx(cat.overlap(hbar))
    with pytest.raises(ConfigError) as info:
        CatState(cat, hbar, term="cc")
    assert info.value.field == "state.term"


def test_gaussian_state_helpers():
    hbar = 0.2
    centre = PhaseVector(0.4, -0.1)
    state = GaussianState(centre, hbar)
    assert gaussian_wigner(state, centre.as_array()) == pytest.approx(1.0 / (np.pi * hbar))
    x = np.array([[0.0, 0.0], [1.0, 0.5]])
    spec = StateSpec.from_config({"type": "gaussian", "P": 0.4, "Q": -0.1})
    np.testing.assert_allclose(spec.wigner0(x, hbar), gaussian_wigner(state, x), rtol=1e-14)
    s0 = gaussian_initial_action(centre)
    ys = np.array([[0.2, -0.3], [1.0, 0.4]])
    np.testing.assert_allclose(np.exp(1j * s0.value(ys) / hbar), state.wigner().chord(ys, hbar), rtol=1e-12)


def test_plane_wave_action_sets_the_history_start():
    x = PhaseVector(0.2, 0.7)
    s0 = plane_wave_action(x)
    y = np.array([0.5, -1.0])
    assert s0.value(y) == pytest.approx(-(0.2 * 0.5 - 0.7 * 1.0))
    np.testing.assert_allclose(-s0.gradient(y), x.as_array())


def test_complex_phase_vector():
    z = ComplexPhaseVector(0.3 + 0.1j, -1.0)
    np.testing.assert_array_equal(as_vector(z), np.array([0.3 + 0.1j, -1.0 + 0.0j]))
    assert isinstance(z.q, complex)
    with pytest.raises(ConfigError):
        ComplexPhaseVector(float("nan"), 0.0)
