"""
Despacho nome do método → avaliação de χ(y, t) para uma configuração de execução.
"""
import logging
from typing import Optional

import numpy as np

from core.double_phase import as_vector
from dynamics.action_cache import ActionCache
from dynamics.complex_wkb import ComplexWKBPropagator
from dynamics.real_wkb import chord_real_wkb, mixed_propagator_batch, propagate_state_via_mixed
from dynamics.trajectories import PlaneWaveAction
from dynamics.workers import map_chunks
from grids.grids_io import ChordGrid
from reference.oracles import (
    MomentumDelta,
    QuadraticModel,
    cubic_model_parameters,
    cubic_saddle_point_chord,
    exact_cubic_cat_chord,
    exact_cubic_mixed_propagator,
    exact_quadratic_chord,
    numeric_cubic_chord,
)
from settings.run_config import RunConfig, check_method

logger = logging.getLogger("chord_wkb_dynamics")


class MethodRunner:
    """Avalia χ por um método nomeado; mantém o cache de ações entre tempos."""

    def __init__(self, config: RunConfig, method: Optional[str] = None, threads: int = 1,
                 cache: Optional[ActionCache] = None):
        self.config = config
        self.method = method or config.method
        check_method(self.method, config.hamiltonian, config.coupling, config.state)
        self.threads = threads
        self.dh = config.double_hamiltonian()
        self.cache = cache if cache is not None else ActionCache()

    def chords(self, y, t: float) -> np.ndarray:
        y = np.asarray(as_vector(y), dtype=float)
        handler = getattr(self, f"_{self.method}")
        value = np.asarray(handler(y, t), dtype=complex)
        return np.broadcast_to(value, y.shape[:-1]).copy()

    def grid(self, t: float) -> ChordGrid:
        c = self.config
        yp, yq = c.grid.axes(c.hbar)
        pp, qq = np.meshgrid(yp, yq, indexing="ij")
        samples = self.chords(np.stack([pp, qq], axis=-1), t)
        logger.info(f"Grade {samples.shape} avaliada por {self.method} em t={t}")
        meta = dict(c.metadata(t), method=self.method)
        return ChordGrid(yp, yq, samples, hbar=c.hbar, t=t, metadata=meta)

    # ------------------------------------------------------------------

    def _complex_wkb(self, y, t):
        c = self.config
        propagator = ComplexWKBPropagator(self.dh, c.hbar, c.numerics, self.threads, self.cache)
        return propagator.state_chord(c.state, y, t)

    def _real_wkb(self, y, t):
        c = self.config
        s0 = PlaneWaveAction(c.state.point)
        flat = y.reshape(-1, 2)
        parts = map_chunks(lambda b: np.atleast_1d(chord_real_wkb(self.dh, s0, flat[b], t, c.hbar, c.numerics).value),
                           flat.shape[0], c.numerics.chunk_size, self.threads)
        return np.concatenate(parts).reshape(y.shape[:-1])

    def _mixed_propagator(self, y, t):
        c = self.config
        if c.state.kind == "plane_wave":
            return mixed_propagator_batch(self.dh, c.state.point.as_array(), y, t, c.hbar,
                                          c.numerics, self.threads)[0]
        return propagate_state_via_mixed(self.dh, c.state, y, t, c.hbar, c.numerics, self.threads)

    def _exact_quadratic(self, y, t):
        c = self.config
        model = QuadraticModel.from_hamiltonian(c.hamiltonian, c.coupling)
        return exact_quadratic_chord(model, lambda z: c.state.chord0(z, c.hbar), y, t, c.hbar)

    def _cubic_sum(self, y, t, oracle, plane_wave=None):
        c = self.config
        coeff, l = cubic_model_parameters(c.hamiltonian, c.coupling)
        if c.state.kind == "plane_wave":
            return plane_wave(c.state.point, l, y, t, c.hbar, coeff)
        total = 0.0
        for comp in c.state.components(c.hbar):
            total = total + comp.weight * oracle(comp.params, l, y, t, c.hbar, coeff)
        return total

    def _exact_cubic(self, y, t):
        return self._cubic_sum(y, t, exact_cubic_cat_chord, exact_cubic_mixed_propagator)

    def _saddle_cubic(self, y, t):
        return self._cubic_sum(y, t, cubic_saddle_point_chord)

    def _quadrature_cubic(self, y, t):
        hbar = self.config.hbar
        return self._cubic_sum(
            y, t,
            lambda cp, l, yy, tt, h, coeff: numeric_cubic_chord(cp.p_representation(hbar), l, yy, tt, h, coeff),
            lambda x, l, yy, tt, h, coeff: numeric_cubic_chord(MomentumDelta(x), l, yy, tt, h, coeff),
        )
