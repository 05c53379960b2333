"""
Configuração de uma execução
Padrões + preset + documento JSON, com acesso por notação de ponto e validação tipada
"""

import copy
import json
import logging
import math
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Any, Dict, Optional, Tuple

import numpy as np

from core.double_phase import DoubleHamiltonian, LindbladCoupling, PhaseVector, PolynomialHamiltonian
from core.errors import ConfigError
from settings.numerics import NumericsSettings
from states.initial_states import StateSpec

logger = logging.getLogger("chord_wkb_settings")

METHODS = ("complex_wkb", "real_wkb", "mixed_propagator", "exact_quadratic",
           "exact_cubic", "saddle_cubic", "quadrature_cubic")
CUBIC_METHODS = ("exact_cubic", "saddle_cubic", "quadrature_cubic")
OUTPUT_FORMATS = ("csv", "json")

DEFAULT_SETTINGS: Dict[str, Any] = {
    "method": "complex_wkb",
    "coupling": {"l_re": [0.0, 0.0], "l_im": [0.0, 0.0]},
    "grid": {
        "extent": None,  # meia largura; None = 10·√ħ
        "resolution": [128, 128],
        "centre": [0.0, 0.0],
    },
    "times": [0.0],
    "output": {"path": "chord_out", "format": "csv"},
    "numerics": {},
    "scaling": {
        "y": [0.3, 1.0],
        "x": [0.0, 0.3],
        "t_list": [0.05, 0.1, 0.2, 0.3, 0.4],
        "l_list": [0.05, 0.1, 0.2, 0.3, 0.4],
        "t_ref": 0.2,
        "l_ref": 0.3,
    },
    "compare": {"method_a": None, "method_b": None},
}

_SQRT_HALF = math.sqrt(0.5)

PRESETS: Dict[str, Dict[str, Any]] = {
    "quartic": {
        "hbar": 1.0,
        "hamiltonian": [{"dp": 0, "dq": 4, "c": 0.25}],
        "coupling": {"l_re": [0.3, 0.0], "l_im": [0.0, 0.0]},
        "state": {"type": "plane_wave", "p": 0.0, "q": 0.3},
        "method": "real_wkb",
    },
    "cubic": {
        "hbar": 0.1,
        "hamiltonian": [{"dp": 3, "dq": 0, "c": 1.0}],
        "coupling": {"l_re": [0.3, 0.0], "l_im": [0.0, 0.0]},
        "state": {"type": "cat", "P": 1.0, "Q": 0.0, "dP": 0.0, "dQ": 2.0, "term": "full"},
        "method": "complex_wkb",
    },
    "quadratic": {
        "hbar": 1.0,
        "hamiltonian": [{"dp": 2, "dq": 0, "c": 0.5}, {"dp": 0, "dq": 2, "c": 0.5}],
        "coupling": {"l_re": [0.0, _SQRT_HALF], "l_im": [_SQRT_HALF, 0.0]},
        "state": {"type": "gaussian", "P": 0.0, "Q": 0.0},
        "method": "complex_wkb",
    },
}


def _merge(base: Dict[str, Any], overlay: Dict[str, Any]) -> Dict[str, Any]:
    """Mescla recursiva; dicionários são combinados, demais valores substituídos."""
    result = copy.deepcopy(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(result.get(key), dict):
            result[key] = _merge(result[key], value)
        else:
            result[key] = copy.deepcopy(value)
    return result


class ConfigStore:
    """Documento de configuração mesclado sobre os padrões (e preset, se houver)"""

    def __init__(self, document: Optional[Dict[str, Any]] = None, source: str = "<memória>"):
        self.source = source
        document = document or {}
        if not isinstance(document, dict):
            raise ConfigError("documento de configuração deve ser um objeto JSON", field="config")
        preset = document.get("preset")
        base = DEFAULT_SETTINGS
        if preset is not None:
            if preset not in PRESETS:
                raise ConfigError(f"preset desconhecido, escolha entre {sorted(PRESETS)}", field="preset")
            base = _merge(base, PRESETS[preset])
        self.settings = _merge(base, document)

    def get(self, key: str, default: Any = None) -> Any:
        """Obtém valor usando notação de ponto"""
        value = self.settings
        try:
            for k in key.split("."):
                value = value[k]
            return value
        except (KeyError, TypeError):
            return default

    def set(self, key: str, value: Any) -> None:
        """Define valor usando notação de ponto"""
        keys = key.split(".")
        settings = self.settings
        for k in keys[:-1]:
            if not isinstance(settings.get(k), dict):
                settings[k] = {}
            settings = settings[k]
        settings[keys[-1]] = value

    def save(self, path: str) -> None:
        """Salva o documento mesclado"""
        document = dict(self.settings, saved_at=datetime.now().isoformat())
        with open(path, "w", encoding="utf-8") as f:
            json.dump(document, f, indent=2, ensure_ascii=False)
        logger.info(f"Configuração salva em {path}")

    def build(self) -> "RunConfig":
        """Validação tipada; cada erro nomeia o campo"""
        s = self.settings
        if "hbar" not in s:
            raise ConfigError("campo obrigatório ausente", field="hbar")
        hbar = _positive("hbar", s["hbar"])
        if "hamiltonian" not in s:
            raise ConfigError("campo obrigatório ausente", field="hamiltonian")
        hamiltonian = PolynomialHamiltonian.from_config(s["hamiltonian"])
        coupling = LindbladCoupling.from_config(s.get("coupling"))
        if "state" not in s:
            raise ConfigError("campo obrigatório ausente", field="state")
        state = StateSpec.from_config(s["state"])

        config = RunConfig(
            hbar=hbar,
            hamiltonian=hamiltonian,
            coupling=coupling,
            state=state,
            method=s.get("method"),
            grid=GridSpec.from_config(s.get("grid")),
            times=_times(s.get("times")),
            output=OutputSpec.from_config(s.get("output")),
            numerics=NumericsSettings.from_config(s.get("numerics")),
            scaling=ScalingSpec.from_config(s.get("scaling")),
            compare=_compare(s.get("compare")),
        )
        check_method(config.method, hamiltonian, coupling, state)
        logger.debug(f"Configuração {self.source} validada: método {config.method}, ħ={hbar}")
        return config


def _number(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"esperado número finito, recebido {value!r}", field=name)
    return float(value)


def _positive(name: str, value: Any) -> float:
    value = _number(name, value)
    if value <= 0.0:
        raise ConfigError("deve ser positivo", field=name)
    return value


def _pair(name: str, value: Any) -> Tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError("esperado par [a, b]", field=name)
    return _number(f"{name}[0]", value[0]), _number(f"{name}[1]", value[1])


def _float_list(name: str, values: Any, minimum: Optional[float] = None) -> Tuple[float, ...]:
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError("esperada lista não vazia de números", field=name)
    result = []
    for i, v in enumerate(values):
        v = _number(f"{name}[{i}]", v)
        if minimum is not None and v < minimum:
            raise ConfigError(f"deve ser ≥ {minimum}", field=f"{name}[{i}]")
        result.append(v)
    return tuple(result)


def _times(values: Any) -> Tuple[float, ...]:
    return _float_list("times", values, minimum=0.0)


def _compare(fragment: Any) -> Optional[Tuple[str, str]]:
    if not isinstance(fragment, dict):
        raise ConfigError("seção compare deve ser um objeto", field="compare")
    a, b = fragment.get("method_a"), fragment.get("method_b")
    if a is None and b is None:
        return None
    for name, value in (("compare.method_a", a), ("compare.method_b", b)):
        if value not in METHODS:
            raise ConfigError(f"método deve ser um de {METHODS}", field=name)
    return a, b


@dataclass(frozen=True)
class GridSpec:
    """Grade de cordas: meia largura, resolução (n_p, n_q) e centro."""

    extent: Optional[float] = None
    resolution: Tuple[int, int] = (128, 128)
    centre: Tuple[float, float] = (0.0, 0.0)

    @classmethod
    def from_config(cls, fragment: Any) -> "GridSpec":
        if not isinstance(fragment, dict):
            raise ConfigError("seção grid deve ser um objeto", field="grid")
        extent = fragment.get("extent")
        if extent is not None:
            extent = _positive("grid.extent", extent)
        res = fragment.get("resolution", [128, 128])
        if not isinstance(res, (list, tuple)) or len(res) != 2:
            raise ConfigError("esperado par [n_p, n_q]", field="grid.resolution")
        for i, n in enumerate(res):
            if isinstance(n, bool) or not isinstance(n, int) or n < 2:
                raise ConfigError("resolução deve ser inteiro ≥ 2", field=f"grid.resolution[{i}]")
        return cls(extent, (int(res[0]), int(res[1])), _pair("grid.centre", fragment.get("centre", [0.0, 0.0])))

    def halfwidth(self, hbar: float) -> float:
        return self.extent if self.extent is not None else 10.0 * math.sqrt(hbar)

    def axes(self, hbar: float) -> Tuple[np.ndarray, np.ndarray]:
        from grids.grids_io import uniform_axis
        hw = self.halfwidth(hbar)
        return (uniform_axis(self.centre[0], hw, self.resolution[0]),
                uniform_axis(self.centre[1], hw, self.resolution[1]))

    def to_config(self) -> Dict[str, Any]:
        return {"extent": self.extent, "resolution": list(self.resolution), "centre": list(self.centre)}


@dataclass(frozen=True)
class OutputSpec:
    path: str = "chord_out"
    format: str = "csv"

    @classmethod
    def from_config(cls, fragment: Any) -> "OutputSpec":
        if not isinstance(fragment, dict):
            raise ConfigError("seção output deve ser um objeto", field="output")
        path = fragment.get("path", "chord_out")
        if not isinstance(path, str) or not path:
            raise ConfigError("caminho de saída inválido", field="output.path")
        fmt = fragment.get("format", "csv")
        if fmt not in OUTPUT_FORMATS:
            raise ConfigError(f"formato deve ser um de {OUTPUT_FORMATS}", field="output.format")
        return cls(path, fmt)


@dataclass(frozen=True)
class ScalingSpec:
    """Varreduras em t e em |l| para medir ΔP."""

    y: Tuple[float, float] = (0.3, 1.0)
    x: Tuple[float, float] = (0.0, 0.3)
    t_list: Tuple[float, ...] = (0.05, 0.1, 0.2, 0.3, 0.4)
    l_list: Tuple[float, ...] = (0.05, 0.1, 0.2, 0.3, 0.4)
    t_ref: float = 0.2
    l_ref: float = 0.3

    @classmethod
    def from_config(cls, fragment: Any) -> "ScalingSpec":
        if not isinstance(fragment, dict):
            raise ConfigError("seção scaling deve ser um objeto", field="scaling")
        d = DEFAULT_SETTINGS["scaling"]
        return cls(
            y=_pair("scaling.y", fragment.get("y", d["y"])),
            x=_pair("scaling.x", fragment.get("x", d["x"])),
            t_list=_float_list("scaling.t_list", fragment.get("t_list", d["t_list"]), minimum=0.0),
            l_list=_float_list("scaling.l_list", fragment.get("l_list", d["l_list"]), minimum=0.0),
            t_ref=_positive("scaling.t_ref", fragment.get("t_ref", d["t_ref"])),
            l_ref=_positive("scaling.l_ref", fragment.get("l_ref", d["l_ref"])),
        )

    def to_config(self) -> Dict[str, Any]:
        return {"y": list(self.y), "x": list(self.x), "t_list": list(self.t_list),
                "l_list": list(self.l_list), "t_ref": self.t_ref, "l_ref": self.l_ref}


def check_method(method: Any, hamiltonian: PolynomialHamiltonian, coupling: LindbladCoupling,
                 state: StateSpec) -> None:
    """Compatibilidade método × modelo, verificada antes de qualquer cálculo."""
    if method not in METHODS:
        raise ConfigError(f"método deve ser um de {METHODS}", field="method")
    if method == "exact_quadratic":
        if hamiltonian.degree > 2:
            raise ConfigError("exact_quadratic exige Hamiltoniana de grau ≤ 2", field="method")
        if state.kind == "plane_wave":
            raise ConfigError("exact_quadratic exige estado cat ou gaussian", field="method")
    if method in CUBIC_METHODS:
        from reference.oracles import cubic_model_parameters
        cubic_model_parameters(hamiltonian, coupling)
        if method == "saddle_cubic" and state.kind == "plane_wave":
            raise ConfigError("saddle_cubic exige estado cat ou gaussian", field="method")
    if method == "real_wkb" and not state.is_real:
        raise ConfigError("real_wkb exige estado plane_wave (ação inicial real)", field="method")


@dataclass(frozen=True)
class RunConfig:
    hbar: float
    hamiltonian: PolynomialHamiltonian
    coupling: LindbladCoupling
    state: StateSpec
    method: str = "complex_wkb"
    grid: GridSpec = field(default_factory=GridSpec)
    times: Tuple[float, ...] = (0.0,)
    output: OutputSpec = field(default_factory=OutputSpec)
    numerics: NumericsSettings = field(default_factory=NumericsSettings)
    scaling: ScalingSpec = field(default_factory=ScalingSpec)
    compare: Optional[Tuple[str, str]] = None

    def double_hamiltonian(self) -> DoubleHamiltonian:
        return DoubleHamiltonian(self.hamiltonian, self.coupling)

    def with_method(self, method: str) -> "RunConfig":
        check_method(method, self.hamiltonian, self.coupling, self.state)
        return replace(self, method=method)

    def with_times(self, times) -> "RunConfig":
        return replace(self, times=_times(list(times)))

    def with_output(self, path: Optional[str] = None, fmt: Optional[str] = None) -> "RunConfig":
        return replace(self, output=OutputSpec.from_config({
            "path": path or self.output.path, "format": fmt or self.output.format}))

    def scaling_point(self) -> Tuple[np.ndarray, PhaseVector]:
        return np.array(self.scaling.y), PhaseVector(*self.scaling.x)

    def metadata(self, t: Optional[float] = None) -> Dict[str, Any]:
        """Metadados gravados junto às grades JSON."""
        meta = {
            "hbar": self.hbar,
            "hamiltonian": self.hamiltonian.to_config(),
            "coupling": self.coupling.to_config(),
            "state": self.state.to_config(),
            "method": self.method,
            "numerics": self.numerics.to_config(),
        }
        if t is not None:
            meta["t"] = t
        return meta


def config_from_dict(document: Dict[str, Any], source: str = "<memória>") -> RunConfig:
    return ConfigStore(document, source).build()


def load_run_config(path: str) -> RunConfig:
    """Lê o documento JSON; erros de sintaxe viram ConfigError com a linha."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"não foi possível ler {path}: {e}", field="config")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON inválido em {path}: {e.msg}", field="config", line=e.lineno)
    return config_from_dict(document, source=path)
