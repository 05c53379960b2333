"""
Função de cordas WKB complexa em ordem dominante:

    χ(y, t) = 𝒦 · exp{(i/ħ)S₀(ȳ₀) + (i/ħ)∫(x·∂𝓗/∂x − 𝓗)dτ − (1/2ħ)∫[(λ′·y)² + (λ″·y)²]dτ}

𝒦 = 1 por padrão; com prefactor="van_vleck" usa 𝒦 = √det(∂ȳ₀/∂y)·e^{γt}.
"""
import logging
from dataclasses import dataclass
from typing import Any, Optional, Tuple

import numpy as np

from core.double_phase import DoubleHamiltonian, as_vector
from dynamics.action_cache import ActionCache
from dynamics.trajectories import InitialAction, solve_histories
from dynamics.workers import map_chunks
from settings.numerics import NumericsSettings
from states.initial_states import StateSpec

logger = logging.getLogger("chord_wkb_dynamics")


@dataclass
class ChordValue:
    """Valor da função de cordas com a ação registrada: value = 𝒦·exp(iS/ħ)."""

    y: np.ndarray
    t: float
    value: Any
    action: Any
    deco: Any
    prefactor: Any = 1.0


class ComplexWKBPropagator:
    """
    Avalia χ por WKB complexo em lotes de nós, com cache de ações por (y, t).

    Os nós são resolvidos em blocos de numerics.chunk_size, distribuídos entre
    threads; o resultado não depende do número de threads.
    """

    def __init__(self, dh: DoubleHamiltonian, hbar: float, numerics: Optional[NumericsSettings] = None,
                 threads: int = 1, cache: Optional[ActionCache] = None):
        if not hbar > 0:
            raise ValueError("hbar deve ser positivo")
        self.dh = dh
        self.hbar = hbar
        self.numerics = numerics or NumericsSettings()
        self.threads = threads
        self.cache = cache if cache is not None else ActionCache()

    @property
    def tracks_prefactor(self) -> bool:
        return self.numerics.prefactor == "van_vleck"

    def _label(self, s0: InitialAction):
        return (repr(s0.describe()), self.dh.include_decoherence, self.numerics.prefactor)

    def _solve_block(self, s0: InitialAction, nodes: np.ndarray, t: float):
        rec = solve_histories(self.dh, s0, nodes, t, self.numerics, track_prefactor=self.tracks_prefactor)
        action = s0.value(rec.y0) + rec.dyn_action + 1j * rec.deco_integral
        if self.tracks_prefactor:
            prefactor = np.exp(self.dh.gamma * t) / rec.sqrt_det
        else:
            prefactor = np.ones(nodes.shape[0], dtype=complex)
        return np.asarray(action), np.asarray(rec.deco_integral), np.asarray(prefactor)

    def actions(self, s0: InitialAction, y, t: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(S, deco, 𝒦) para cada nó de y (forma (..., 2))."""
        y = np.asarray(as_vector(y), dtype=float)
        batch_shape = y.shape[:-1]
        flat = y.reshape(-1, 2)
        label = self._label(s0)
        keys = [ActionCache.key(label, node, t) for node in flat]
        action = np.empty(flat.shape[0], dtype=complex)
        deco = np.empty(flat.shape[0], dtype=complex)
        prefactor = np.empty(flat.shape[0], dtype=complex)
        missing = []
        for i, key in enumerate(keys):
            entry = self.cache.get(key)
            if entry is None:
                missing.append(i)
            else:
                action[i], deco[i], prefactor[i] = entry

        if missing:
            idx = np.array(missing)
            todo = flat[idx]
            blocks = map_chunks(lambda b: self._solve_block(s0, todo[b], t),
                                todo.shape[0], self.numerics.chunk_size, self.threads)
            action[idx] = np.concatenate([b[0] for b in blocks])
            deco[idx] = np.concatenate([b[1] for b in blocks])
            prefactor[idx] = np.concatenate([b[2] for b in blocks])
            for i in missing:
                self.cache.put(keys[i], (action[i], deco[i], prefactor[i]))
            logger.debug(f"{len(missing)} nós resolvidos em t={t}; {flat.shape[0] - len(missing)} do cache")

        shape = batch_shape
        return action.reshape(shape), deco.reshape(shape), prefactor.reshape(shape)

    def chord(self, s0: InitialAction, y, t: float) -> ChordValue:
        action, deco, prefactor = self.actions(s0, y, t)
        value = prefactor * np.exp(1j * action / self.hbar)
        return ChordValue(np.asarray(y), t, _scalar(value), _scalar(action), _scalar(deco), _scalar(prefactor))

    def state_chord(self, state: StateSpec, y, t: float):
        """Soma ponderada dos termos do estado (ex.: os quatro termos do gato)."""
        total = 0.0
        for component in state.components(self.hbar):
            total = total + component.weight * self.chord(component.action, y, t).value
        return total

    def evaluate_grid(self, state: StateSpec, yp_axis, yq_axis, t: float) -> np.ndarray:
        yp, yq = np.meshgrid(np.asarray(yp_axis, float), np.asarray(yq_axis, float), indexing="ij")
        return np.asarray(self.state_chord(state, np.stack([yp, yq], axis=-1), t), dtype=complex)


def _scalar(value):
    value = np.asarray(value)
    return value[()] if value.ndim == 0 else value


def chord_wkb(dh: DoubleHamiltonian, s0: InitialAction, y, t: float, hbar: float,
              numerics: Optional[NumericsSettings] = None) -> ChordValue:
    return ComplexWKBPropagator(dh, hbar, numerics).chord(s0, y, t)


def hj_terms(propagator: ComplexWKBPropagator, s0: InitialAction, y, t: float, h: float):
    """
    (∂S/∂t, 𝓗_c(−∂S/∂y, y)) por diferenças finitas das ações em cache.
    Em t < h a derivada temporal é unilateral de segunda ordem.
    """
    y = np.asarray(as_vector(y), dtype=float)
    offsets = np.array([[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]])
    s_y, _, _ = propagator.actions(s0, y + offsets, t)
    grad = np.array([(s_y[0] - s_y[1]) / (2 * h), (s_y[2] - s_y[3]) / (2 * h)])
    if t >= h:
        s_hi = propagator.actions(s0, y, t + h)[0]
        s_lo = propagator.actions(s0, y, t - h)[0]
        ds_dt = (s_hi - s_lo) / (2 * h)
    else:
        s0_t = propagator.actions(s0, y, t)[0]
        s1_t = propagator.actions(s0, y, t + h)[0]
        s2_t = propagator.actions(s0, y, t + 2 * h)[0]
        ds_dt = (-3.0 * s0_t + 4.0 * s1_t - s2_t) / (2 * h)
    energy = propagator.dh.complex_value(-grad, y)
    return complex(ds_dt), complex(energy)


def hj_residual(dh: DoubleHamiltonian, s0: InitialAction, y, t: float, hbar: float, h: float,
                numerics: Optional[NumericsSettings] = None,
                propagator: Optional[ComplexWKBPropagator] = None) -> float:
    """|∂S/∂t + 𝓗_c(−∂S/∂y, y)|."""
    propagator = propagator or ComplexWKBPropagator(dh, hbar, numerics)
    ds_dt, energy = hj_terms(propagator, s0, y, t, h)
    return abs(ds_dt + energy)
