"""
Parâmetros numéricos compartilhados pelos motores (RK4, Newton, quadratura).
"""
import math
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional

from core.errors import ConfigError

PREFACTOR_CHOICES = ("unit", "van_vleck")


@dataclass(frozen=True)
class NumericsSettings:
    steps_per_unit: int = 1000
    shoot_tol: float = 1e-10
    max_newton: int = 50
    fd_step: float = 1e-6
    divergence_bound: float = 1e8
    prefactor: str = "unit"
    quad_nodes: int = 64
    quad_halfwidth: float = 6.0
    quad_tol: float = 1e-8
    chunk_size: int = 256

    def __post_init__(self):
        positive = ("steps_per_unit", "shoot_tol", "max_newton", "fd_step",
                    "divergence_bound", "quad_nodes", "quad_halfwidth", "quad_tol", "chunk_size")
        for name in positive:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool) \
                    or not math.isfinite(value) or value <= 0:
                raise ConfigError(f"deve ser número positivo, recebido {value!r}", field=f"numerics.{name}")
        for name in ("steps_per_unit", "max_newton", "quad_nodes", "chunk_size"):
            if int(getattr(self, name)) != getattr(self, name):
                raise ConfigError("deve ser inteiro", field=f"numerics.{name}")
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.prefactor not in PREFACTOR_CHOICES:
            raise ConfigError(f"escolha entre {PREFACTOR_CHOICES}", field="numerics.prefactor")

    @classmethod
    def from_config(cls, fragment: Optional[Dict[str, Any]]) -> "NumericsSettings":
        if fragment is None:
            return cls()
        if not isinstance(fragment, dict):
            raise ConfigError("seção numerics deve ser um objeto", field="numerics")
        known = {f.name for f in fields(cls)}
        unknown = set(fragment) - known
        if unknown:
            raise ConfigError(f"chaves desconhecidas: {sorted(unknown)}", field="numerics")
        return cls(**fragment)

    def to_config(self) -> Dict[str, Any]:
        return asdict(self)

    def steps_for(self, t: float) -> int:
        """Número de passos RK4 para o tempo t, sempre par (Simpson composto)."""
        if t <= 0.0:
            return 0
        steps = max(2, math.ceil(t * self.steps_per_unit - 1e-9))
        return steps + (steps % 2)
