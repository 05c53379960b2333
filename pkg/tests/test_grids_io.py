import json
import math

import numpy as np
import pytest

from core.double_phase import LindbladCoupling
from core.errors import ConfigError, GridIOError, SupportTruncationError
from grids.grids_io import (
    ChordGrid,
    chord_to_wigner,
    fringe_amplitude,
    purity,
    read_grid,
    uniform_axis,
    wigner_to_chord,
    write_grid,
    write_table,
)
from reference.oracles import QuadraticModel, exact_cubic_cat_chord, exact_quadratic_chord
from states.initial_states import StateSpec


def _coherent_grid(hbar=0.1, n=64, centre=(0.0, 0.0)):
    axis = uniform_axis(0.0, 10 * math.sqrt(hbar), n)
    yp, yq = np.meshgrid(axis, axis, indexing="ij")
    chi = np.exp(-(yp ** 2 + yq ** 2) / (4 * hbar) - 1j * (centre[0] * yp + centre[1] * yq) / hbar)
    return ChordGrid(axis, axis, chi, hbar, t=0.0, metadata={"method": "analytic"})


def test_uniform_axis_contains_origin():
    axis = uniform_axis(0.0, 6.4, 128)
    assert axis[64] == 0.0
    assert axis[1] - axis[0] == pytest.approx(0.1)


def test_coherent_state_wigner_peak():
    w = chord_to_wigner(_coherent_grid())
    i, j = np.argmin(np.abs(w.p)), np.argmin(np.abs(w.q))
    assert w.samples[i, j] == pytest.approx(1.0 / (math.pi * 0.1), rel=1e-9)
    assert w.total() == pytest.approx(1.0, rel=1e-9)
    assert w.residual_imag < 1e-10


def test_transform_round_trip():
    g = _coherent_grid(centre=(0.3, -0.2))
    back = wigner_to_chord(chord_to_wigner(g))
    np.testing.assert_allclose(back.yp, g.yp, atol=1e-12)
    np.testing.assert_allclose(back.yq, g.yq, atol=1e-12)
    np.testing.assert_allclose(back.samples, g.samples, atol=1e-12)
    assert back.metadata == {"method": "analytic"}


def test_coherent_state_is_pure():
    assert purity(_coherent_grid()) == pytest.approx(1.0, rel=1e-9)


def test_truncated_support_is_rejected():
    axis = uniform_axis(0.0, 0.5, 16)
    yp, yq = np.meshgrid(axis, axis, indexing="ij")
    g = ChordGrid(axis, axis, np.exp(-(yp ** 2 + yq ** 2) / 0.4), 0.1)
    with pytest.raises(SupportTruncationError):
        chord_to_wigner(g)
    with pytest.raises(SupportTruncationError):
        purity(g)
    assert purity(g, check=False) > 0


def test_grid_validation():
    axis = np.array([0.0, 0.1, 0.3])
    with pytest.raises(ValueError):
        ChordGrid(axis, axis, np.zeros((3, 3)), 0.1)
    good = np.array([0.0, 0.1, 0.2])
    with pytest.raises(ValueError):
        ChordGrid(good, good, np.full((3, 3), np.nan), 0.1)
    with pytest.raises(ValueError):
        ChordGrid(good, good, np.zeros((2, 3)), 0.1)


def test_json_round_trip(tmp_path):
    g = _coherent_grid(n=16)
    g.t = 0.5
    path = str(tmp_path / "chord.json")
    write_grid(g, path, "json", metadata={"seed": 1})
    back = read_grid(path)
    np.testing.assert_array_equal(back.samples, g.samples)
    np.testing.assert_array_equal(back.yp, g.yp)
    assert back.hbar == 0.1
    assert back.t == 0.5
    assert back.metadata == {"method": "analytic", "seed": 1}

    w = chord_to_wigner(_coherent_grid())
    wpath = str(tmp_path / "wigner.json")
    write_grid(w, wpath, "json")
    wback = read_grid(wpath)
    np.testing.assert_array_equal(wback.samples, w.samples)
    assert wback.chord_origin == w.chord_origin


def test_csv_round_trip_needs_hbar(tmp_path):
    g = _coherent_grid(n=8)
    path = str(tmp_path / "chord.csv")
    write_grid(g, path)
    with open(path, encoding="utf-8") as f:
        header = f.readline().strip()
    assert header == "y_p,y_q,t,re,im,abs,phase"
    back = read_grid(path, hbar=0.1)
    np.testing.assert_array_equal(back.samples, g.samples)
    with pytest.raises(GridIOError):
        read_grid(path)


def test_io_errors(tmp_path):
    g = _coherent_grid(n=8)
    with pytest.raises(ConfigError) as info:
        write_grid(g, str(tmp_path / "x.xml"), "xml")
    assert info.value.field == "output.format"
    with pytest.raises(GridIOError):
        write_grid(g, str(tmp_path / "missing" / "x.csv"))
    with pytest.raises(GridIOError):
        read_grid(str(tmp_path / "nothing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "chord_grid",\n "hbar": }')
    with pytest.raises(GridIOError):
        read_grid(str(bad))
    wigner_csv = str(tmp_path / "w.csv")
    write_grid(chord_to_wigner(_coherent_grid()), wigner_csv)
    with pytest.raises(GridIOError):
        read_grid(wigner_csv, hbar=0.1)


def test_write_table(tmp_path):
    path = tmp_path / "table.csv"
    write_table(["row", "value", "note"], [[0, 0.1, "a"], ["max", None, "b"]], str(path))
    lines = path.read_text().splitlines()
    assert lines == ["row,value,note", "0,0.10000000000000001,a", "max,,b"]


def _cat_grid(t, hbar=0.1, l=0.3, n=128):
    state = StateSpec.from_config({"type": "cat", "P": 0.0, "Q": 0.0, "dP": 2.0, "dQ": 0.0})
    model = QuadraticModel(np.zeros((2, 2)), LindbladCoupling.momentum(l))
    axis = uniform_axis(0.0, 6.4, n)
    yp, yq = np.meshgrid(axis, axis, indexing="ij")
    ys = np.stack([yp, yq], axis=-1)
    chi = exact_quadratic_chord(model, lambda y: state.chord0(y, hbar), ys, t, hbar)
    return ChordGrid(axis, axis, chi, hbar, t)


def test_cat_fringes_decay_under_momentum_decoherence():
    grids = [_cat_grid(t) for t in (0.0, 0.5, 1.0)]
    assert grids[0].value_at_origin() == pytest.approx(1.0, abs=1e-12)
    assert purity(grids[0]) == pytest.approx(1.0, rel=1e-6)
    purities = [purity(g) for g in grids]
    assert purities[0] > purities[1] > purities[2]

    fringes = [fringe_amplitude(chord_to_wigner(g), (0.0, 2.0)) for g in grids]
    assert fringes[1] / fringes[2] == pytest.approx(math.exp(0.9), rel=1e-6)
    assert fringes[0] / fringes[1] == pytest.approx(math.exp(0.9), rel=1e-6)
    for g in grids:
        assert g.value_at_origin() == pytest.approx(1.0, abs=1e-12)


def test_json_document_is_plain(tmp_path):
    path = tmp_path / "g.json"
    write_grid(_coherent_grid(n=4), str(path), "json")
    doc = json.loads(path.read_text())
    assert doc["kind"] == "chord_grid"
    assert len(doc["re"]) == 4


def test_purity_is_stable_under_refinement():
    coarse, fine = _cat_grid(0.5, n=128), _cat_grid(0.5, n=256)
    assert abs(purity(coarse) - purity(fine)) < 1e-6
    w = chord_to_wigner(fine)
    wigner_side = 2 * math.pi * fine.hbar * np.sum(w.samples ** 2) * w.dp * w.dq
    assert purity(fine) == pytest.approx(wigner_side, rel=1e-9)


def _cubic_cat_grid(t, hbar=0.1, l=0.3):
    state = StateSpec.from_config({"type": "cat", "P": 0.0, "Q": 0.0, "dP": 2.0, "dQ": 0.0})
    yp, yq = np.meshgrid(uniform_axis(0.0, 28.8, 288), uniform_axis(0.0, 6.4, 128), indexing="ij")
    ys = np.stack([yp, yq], axis=-1)
    chi = sum(c.weight * exact_cubic_cat_chord(c.params, l, ys, t, hbar) for c in state.components(hbar))
    return ChordGrid(yp[:, 0], yq[0], chi, hbar, t)


def test_cubic_cat_fringes_decay_beyond_the_dispersive_factor():
    times = (0.0, 0.5, 1.0)
    grids = [_cubic_cat_grid(t) for t in times]
    purities = [purity(g) for g in grids]
    assert purities[0] > purities[1] > purities[2]
    # |χ_ab(0, 2)| = e^{−2l²t/ħ} |1 + 6it|^(−1/2)
    fringes = [fringe_amplitude(chord_to_wigner(g), (0.0, 2.0)) * abs(1 + 6j * t) ** 0.5
               for g, t in zip(grids, times)]
    assert fringes[0] / fringes[1] == pytest.approx(math.exp(0.9), rel=1e-6)
    assert fringes[1] / fringes[2] == pytest.approx(math.exp(0.9), rel=1e-6)
