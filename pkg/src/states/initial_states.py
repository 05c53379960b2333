"""
Estados iniciais: pacotes gaussianos, termos do estado gato e ondas planas.

Convenção de cordas: χ(y) = ∫ exp(−i y·x/ħ) W(x) dx, de modo que χ(0) = Tr ρ.
Cada termo gaussiano é guardado pela sua ação inicial S₀(y), independente de ħ,
com χ₀(y) = exp(i S₀(y)/ħ).
"""
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from core.double_phase import PhaseVector, as_vector, dot
from core.errors import ConfigError
from dynamics.trajectories import InitialAction, PlaneWaveAction, QuadraticFormAction

logger = logging.getLogger("chord_wkb_states")

CAT_TERMS = ("aa", "bb", "ab", "ba")
STATE_TYPES = ("cat", "gaussian", "plane_wave")


def _finite(name: str, value: Any) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"valor numérico esperado, recebido {value!r}", field=name)
    if not np.isfinite(value):
        raise ConfigError("valor não finito", field=name)
    return value


@dataclass(frozen=True)
class CatParams:
    """
    Parâmetros (P, Q, ΔP, ΔQ) de um termo |b⟩⟨a| entre estados coerentes
    centrados em (P ∓ ΔP/2, Q ∓ ΔQ/2). Com ΔP = ΔQ = 0 é o estado coerente em (P, Q).
    """

    P: float
    Q: float
    dP: float = 0.0
    dQ: float = 0.0

    def __post_init__(self):
        for name in ("P", "Q", "dP", "dQ"):
            object.__setattr__(self, name, _finite(f"state.{name}", getattr(self, name)))

    def term(self, name: str) -> "CatParams":
        """Parâmetros de um dos quatro termos de ρ = |a+b⟩⟨a+b| (sem normalização)."""
        if name == "aa":
            return CatParams(self.P - self.dP / 2, self.Q - self.dQ / 2)
        if name == "bb":
            return CatParams(self.P + self.dP / 2, self.Q + self.dQ / 2)
        if name == "ab":
            return self
        if name == "ba":
            return CatParams(self.P, self.Q, -self.dP, -self.dQ)
        raise ConfigError(f"termo desconhecido {name!r}; use {CAT_TERMS}", field="state.term")

    def overlap(self, hbar: float) -> complex:
        """χ_ab(0) = ⟨a|b⟩ = exp(−iPΔQ/ħ − (ΔQ² + ΔP²)/4ħ)."""
        return complex(np.exp(-1j * self.P * self.dQ / hbar - (self.dQ ** 2 + self.dP ** 2) / (4 * hbar)))

    def full_norm(self, hbar: float) -> float:
        """Tr de |a+b⟩⟨a+b| = 2 + 2 Re⟨a|b⟩."""
        return 2.0 + 2.0 * self.overlap(hbar).real

    def gaussian(self) -> "GaussianWigner":
        return GaussianWigner(
            centre=PhaseVector(self.P, self.Q),
            k=np.array([-self.dQ, self.dP]),
            phase0=-self.dQ * self.P,
        )

    def p_representation(self, hbar: float) -> Callable[[Any, Any], Any]:
        """⟨p′|b⟩⟨a|p″⟩ com estados coerentes ψ_X(p) = (πħ)^(-1/4) exp(−ipQ/ħ − (p−P)²/2ħ)."""
        p_a, p_b = self.P - self.dP / 2, self.P + self.dP / 2
        q_a, q_b = self.Q - self.dQ / 2, self.Q + self.dQ / 2
        norm = (np.pi * hbar) ** -0.5

        def rho(p1, p2):
            return norm * np.exp(-1j * (p1 * q_b - p2 * q_a) / hbar
                                 - (p1 - p_b) ** 2 / (2 * hbar) - (p2 - p_a) ** 2 / (2 * hbar))

        return rho


@dataclass(frozen=True)
class GaussianWigner:
    """
    W(x) = (1/πħ) exp(−|x−X|²/ħ + (i/ħ)(k·(x−X) + φ₀)).

    Família fechada sob a transformada de cordas:
    χ(y) = exp(−|y−k|²/4ħ − iX·y/ħ + iφ₀/ħ).
    """

    centre: PhaseVector
    k: np.ndarray
    phase0: float = 0.0

    @property
    def is_real(self) -> bool:
        return not np.any(self.k) and self.phase0 == 0.0

    def value(self, x, hbar: float):
        x = as_vector(x)
        u = x - self.centre.as_array()
        exponent = -dot(u, u) / hbar + 1j * (dot(self.k, u) + self.phase0) / hbar
        w = np.exp(exponent) / (np.pi * hbar)
        return w.real if self.is_real else w

    def chord(self, y, hbar: float):
        y = as_vector(y)
        d = y - self.k
        return np.exp(-dot(d, d) / (4 * hbar) - 1j * dot(self.centre.as_array(), y) / hbar
                      + 1j * self.phase0 / hbar)

    def initial_action(self) -> QuadraticFormAction:
        """S₀(y) = (i/4)|y−k|² − X·y + φ₀."""
        return QuadraticFormAction(
            matrix=0.5j * np.eye(2),
            vector=-self.centre.as_array() - 0.5j * self.k,
            scalar=0.25j * float(dot(self.k, self.k)) + self.phase0,
        )


@dataclass(frozen=True)
class GaussianState:
    centre: PhaseVector
    hbar: float

    def wigner(self) -> GaussianWigner:
        return GaussianWigner(self.centre, np.zeros(2))


@dataclass(frozen=True)
class CatState:
    """ρ = |a+b⟩⟨a+b| normalizado, ou um único termo dele quando term ≠ "full"."""

    params: CatParams
    hbar: float
    term: str = "full"

    def __post_init__(self):
        if self.term not in CAT_TERMS + ("full",):
            raise ConfigError(f"termo deve ser um de {CAT_TERMS + ('full',)}", field="state.term")

    def terms(self) -> Tuple[Tuple[str, float, CatParams], ...]:
        """(rótulo, peso, parâmetros) de cada termo; pesos somam traço 1 na soma completa."""
        if self.term != "full":
            return ((self.term, 1.0, self.params.term(self.term)),)
        weight = 1.0 / self.params.full_norm(self.hbar)
        return tuple((name, weight, self.params.term(name)) for name in CAT_TERMS)

    def chord(self, y):
        return sum(w * p.gaussian().chord(y, self.hbar) for _, w, p in self.terms())


def cat_initial_action(cp: CatParams) -> QuadraticFormAction:
    """S₀(y) = −Qy_q − P(y_p+ΔQ) + (i/4)(y_p+ΔQ)² + (i/4)(y_q−ΔP)²."""
    return cp.gaussian().initial_action()


def gaussian_initial_action(centre: PhaseVector) -> QuadraticFormAction:
    return GaussianWigner(centre, np.zeros(2)).initial_action()


def gaussian_wigner(g: GaussianState, x):
    """(1/πħ) exp(−|x−X|²/ħ)."""
    return g.wigner().value(x, g.hbar)


def plane_wave_action(x: PhaseVector) -> PlaneWaveAction:
    return PlaneWaveAction(x)


@dataclass(frozen=True)
class StateComponent:
    """Termo da soma que compõe o estado: peso, ação inicial e (se houver) Wigner gaussiana."""

    label: str
    weight: float
    action: InitialAction
    wigner: Optional[GaussianWigner] = None
    params: Optional[CatParams] = None

    def chord0(self, y, hbar: float):
        return self.weight * np.exp(1j * self.action.value(as_vector(y)) / hbar)


@dataclass(frozen=True)
class StateSpec:
    """Fragmento de estado da configuração: cat (com termo), gaussian ou plane_wave."""

    kind: str
    params: Optional[CatParams] = None
    term: str = "full"
    point: Optional[PhaseVector] = None

    @classmethod
    def from_config(cls, fragment: Dict[str, Any]) -> "StateSpec":
        if not isinstance(fragment, dict):
            raise ConfigError("estado deve ser um objeto", field="state")
        kind = fragment.get("type")
        if kind not in STATE_TYPES:
            raise ConfigError(f"tipo de estado deve ser um de {STATE_TYPES}", field="state.type")
        if kind == "plane_wave":
            for key in ("p", "q"):
                if key not in fragment:
                    raise ConfigError("chave ausente", field=f"state.{key}")
            return cls(kind, point=PhaseVector(_finite("state.p", fragment["p"]), _finite("state.q", fragment["q"])))
        for key in ("P", "Q"):
            if key not in fragment:
                raise ConfigError("chave ausente", field=f"state.{key}")
        if kind == "gaussian":
            return cls(kind, params=CatParams(fragment["P"], fragment["Q"]), term="ab")
        term = fragment.get("term", "full")
        if term not in CAT_TERMS + ("full",):
            raise ConfigError(f"termo deve ser um de {CAT_TERMS + ('full',)}", field="state.term")
        params = CatParams(fragment["P"], fragment["Q"], fragment.get("dP", 0.0), fragment.get("dQ", 0.0))
        return cls(kind, params=params, term=term)

    def to_config(self) -> Dict[str, Any]:
        if self.kind == "plane_wave":
            return {"type": self.kind, "p": self.point.p, "q": self.point.q}
        if self.kind == "gaussian":
            return {"type": self.kind, "P": self.params.P, "Q": self.params.Q}
        return {"type": self.kind, "P": self.params.P, "Q": self.params.Q,
                "dP": self.params.dP, "dQ": self.params.dQ, "term": self.term}

    @property
    def is_real(self) -> bool:
        return self.kind == "plane_wave"

    def components(self, hbar: float) -> Tuple[StateComponent, ...]:
        if self.kind == "plane_wave":
            return (StateComponent("plane_wave", 1.0, plane_wave_action(self.point)),)
        if self.kind == "gaussian":
            state = GaussianState(PhaseVector(self.params.P, self.params.Q), hbar)
            return (StateComponent(self.term, 1.0, gaussian_initial_action(state.centre), state.wigner(),
                                   self.params),)
        return tuple(StateComponent(label, weight, cat_initial_action(params), params.gaussian(), params)
                     for label, weight, params in CatState(self.params, hbar, self.term).terms())

    def chord0(self, y, hbar: float):
        return sum(c.chord0(y, hbar) for c in self.components(hbar))

    def wigner0(self, x, hbar: float):
        if self.kind == "gaussian":
            return gaussian_wigner(GaussianState(PhaseVector(self.params.P, self.params.Q), hbar), x)
        comps = self.components(hbar)
        if any(c.wigner is None for c in comps):
            raise ValueError("onda plana não tem função de Wigner regular")
        total = sum(c.weight * c.wigner.value(x, hbar) for c in comps)
        return np.real(total) if self.term == "full" else total
