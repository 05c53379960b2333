"""
Hierarquia de exceções do chord-wkb.
Todas derivam de ChordWKBError; a CLI converte cada família num código de saída.
"""
from typing import Optional, Sequence


class ChordWKBError(Exception):
    """Erro base de toda a biblioteca."""

    exit_code = 3


class ConfigError(ChordWKBError):
    """Configuração inválida: identifica o campo (e a linha, quando conhecida)."""

    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if field:
            location.append(f"campo '{field}'")
        if line is not None:
            location.append(f"linha {line}")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")


class GridIOError(ChordWKBError):
    """Falha de leitura/escrita de grades."""

    exit_code = 2


class NumericalError(ChordWKBError):
    """Falha numérica; opcionalmente localizada em (y, t)."""

    def __init__(self, message: str, chord: Optional[Sequence[complex]] = None, t: Optional[float] = None):
        self.chord = None if chord is None else tuple(chord)
        self.t = t
        where = ""
        if self.chord is not None:
            where += f" em y={tuple(complex(c) for c in self.chord)}"
        if t is not None:
            where += f" t={t}"
        super().__init__(f"{message}{where}")


class TrajectoryDivergenceError(NumericalError):
    """Alguma componente da trajetória ultrapassou o limite de divergência."""


class ShootingError(NumericalError):
    """O Newton do problema de contorno não convergiu."""

    def __init__(self, message: str, best_residual: float, chord=None, t=None):
        self.best_residual = best_residual
        super().__init__(f"{message} (melhor resíduo {best_residual:.3e})", chord=chord, t=t)


class QuadratureError(NumericalError):
    """Quadratura não convergiu na tolerância pedida."""


class SupportTruncationError(NumericalError):
    """A grade não cobre o suporte do estado (bordas não desprezíveis)."""


class ExpansionInvalidError(NumericalError):
    """A expansão quadrática da ação deixou de valer na largura do pacote."""


class BranchTrackingError(NumericalError):
    """Raiz quadrada complexa passou perto de zero ao longo do caminho em t."""
