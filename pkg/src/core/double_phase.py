"""
Camada geométrica/algébrica do espaço de fase duplo.

Vetores de fase x = (p, q), produto exterior, dados do acoplamento de Lindblad
linear e o par de Hamiltonianas duplas (real e complexa) com derivadas exatas.
Todas as funções aceitam arrays com forma (..., 2) e fazem broadcast sobre os
eixos iniciais, de modo que uma grade inteira de nós é avaliada de uma vez.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import ConfigError

logger = logging.getLogger("chord_wkb_core")

# Matriz simplética J = [[0, -1], [1, 0]]
J = np.array([[0.0, -1.0], [1.0, 0.0]])

VectorLike = Union["PhaseVector", "ComplexPhaseVector", Sequence[complex], np.ndarray]


def _require_finite(name: str, *values: complex) -> None:
    for value in values:
        if not np.isfinite(complex(value)):
            raise ConfigError(f"componente não finita: {value!r}", field=name)


@dataclass(frozen=True)
class PhaseVector:
    """Ponto real do espaço de fase, x = (p, q)."""

    p: float
    q: float

    def __post_init__(self):
        _require_finite("PhaseVector", self.p, self.q)
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))

    @classmethod
    def from_sequence(cls, values: Sequence[float], name: str = "vector") -> "PhaseVector":
        if values is None or len(values) != 2:
            raise ConfigError("esperado par [p, q]", field=name)
        try:
            p, q = float(values[0]), float(values[1])
        except (TypeError, ValueError):
            raise ConfigError(f"componentes inválidas: {values!r}", field=name)
        _require_finite(name, p, q)
        return cls(p, q)

    def as_array(self) -> np.ndarray:
        return np.array([self.p, self.q])

    def norm(self) -> float:
        return float(np.hypot(self.p, self.q))

    def __add__(self, other: "PhaseVector") -> "PhaseVector":
        return PhaseVector(self.p + other.p, self.q + other.q)

    def scaled(self, factor: float) -> "PhaseVector":
        return PhaseVector(self.p * factor, self.q * factor)


@dataclass(frozen=True)
class ComplexPhaseVector:
    """Ponto do espaço de fase complexificado; também guarda cordas y = Jξ."""

    p: complex
    q: complex

    def __post_init__(self):
        _require_finite("ComplexPhaseVector", self.p, self.q)
        object.__setattr__(self, "p", complex(self.p))
        object.__setattr__(self, "q", complex(self.q))

    def as_array(self) -> np.ndarray:
        return np.array([self.p, self.q], dtype=complex)


def as_vector(v: VectorLike) -> np.ndarray:
    """Normaliza qualquer representação de vetor para um array (..., 2)."""
    if isinstance(v, (PhaseVector, ComplexPhaseVector)):
        return v.as_array()
    arr = np.asarray(v)
    if arr.shape[-1:] != (2,):
        raise ValueError(f"vetor de fase precisa de última dimensão 2, recebido {arr.shape}")
    return arr


def apply_J(v: np.ndarray) -> np.ndarray:
    """J v = (-v_q, v_p)."""
    v = np.asarray(v)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Produto escalar bilinear (sem conjugação) sobre o último eixo."""
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]


def wedge(a: VectorLike, b: VectorLike):
    """a ∧ b = p_a q_b - p_b q_a; bilinear, antissimétrico, aceita complexos."""
    a = as_vector(a)
    b = as_vector(b)
    result = a[..., 0] * b[..., 1] - b[..., 0] * a[..., 1]
    return result[()] if isinstance(result, np.ndarray) and result.ndim == 0 else result


@dataclass(frozen=True)
class Monomial:
    dp: int
    dq: int
    coeff: float

    def __post_init__(self):
        if int(self.dp) != self.dp or int(self.dq) != self.dq or self.dp < 0 or self.dq < 0:
            raise ConfigError(f"graus do monômio devem ser inteiros não negativos: {self}", field="hamiltonian")
        _require_finite("hamiltonian.c", self.coeff)
        if isinstance(self.coeff, complex) or np.iscomplexobj(self.coeff):
            raise ConfigError("coeficientes da Hamiltoniana devem ser reais", field="hamiltonian.c")
        object.__setattr__(self, "dp", int(self.dp))
        object.__setattr__(self, "dq", int(self.dq))
        object.__setattr__(self, "coeff", float(self.coeff))

    @property
    def degree(self) -> int:
        return self.dp + self.dq


def _power(z: np.ndarray, n: int) -> np.ndarray:
    if n == 0:
        return np.ones_like(z)
    if n == 1:
        return z
    return z ** n


@dataclass(frozen=True)
class PolynomialHamiltonian:
    """
    H(p, q) = Σ c p^dp q^dq com coeficientes reais.
    Avaliável em argumentos complexos; gradiente e Hessiana termo a termo.
    """

    terms: Tuple[Monomial, ...]

    def __post_init__(self):
        merged: Dict[Tuple[int, int], float] = {}
        for term in self.terms:
            key = (term.dp, term.dq)
            merged[key] = merged.get(key, 0.0) + term.coeff
        terms = tuple(Monomial(dp, dq, c) for (dp, dq), c in sorted(merged.items()) if c != 0.0)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[int, int, float]]) -> "PolynomialHamiltonian":
        return cls(tuple(Monomial(dp, dq, c) for dp, dq, c in terms))

    @classmethod
    def from_config(cls, records: List[Dict[str, Any]]) -> "PolynomialHamiltonian":
        """Lê a lista [{dp, dq, c}, ...] do arquivo de configuração."""
        if not isinstance(records, list) or not records:
            raise ConfigError("esperada lista não vazia de monômios {dp, dq, c}", field="hamiltonian")
        terms = []
        for index, record in enumerate(records):
            if not isinstance(record, dict):
                raise ConfigError("monômio deve ser um objeto", field=f"hamiltonian[{index}]")
            for key in ("dp", "dq", "c"):
                if key not in record:
                    raise ConfigError("chave ausente", field=f"hamiltonian[{index}].{key}")
            try:
                terms.append(Monomial(record["dp"], record["dq"], record["c"]))
            except (TypeError, ValueError):
                raise ConfigError(f"monômio inválido: {record!r}", field=f"hamiltonian[{index}]")
        return cls(tuple(terms))

    def to_config(self) -> List[Dict[str, Any]]:
        return [{"dp": t.dp, "dq": t.dq, "c": t.coeff} for t in self.terms]

    @property
    def degree(self) -> int:
        return max((t.degree for t in self.terms), default=0)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x = as_vector(x)
        p, q = x[..., 0], x[..., 1]
        result = np.zeros(np.broadcast(p, q).shape, dtype=np.result_type(x, float))
        for t in self.terms:
            result = result + t.coeff * _power(p, t.dp) * _power(q, t.dq)
        return result

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = as_vector(x)
        p, q = x[..., 0], x[..., 1]
        dtype = np.result_type(x, float)
        gp = np.zeros(p.shape, dtype=dtype)
        gq = np.zeros(q.shape, dtype=dtype)
        for t in self.terms:
            if t.dp:
                gp = gp + (t.coeff * t.dp) * _power(p, t.dp - 1) * _power(q, t.dq)
            if t.dq:
                gq = gq + (t.coeff * t.dq) * _power(p, t.dp) * _power(q, t.dq - 1)
        return np.stack([gp, gq], axis=-1)

    def hessian(self, x: np.ndarray) -> np.ndarray:
        x = as_vector(x)
        p, q = x[..., 0], x[..., 1]
        dtype = np.result_type(x, float)
        hpp = np.zeros(p.shape, dtype=dtype)
        hpq = np.zeros(p.shape, dtype=dtype)
        hqq = np.zeros(p.shape, dtype=dtype)
        for t in self.terms:
            if t.dp >= 2:
                hpp = hpp + (t.coeff * t.dp * (t.dp - 1)) * _power(p, t.dp - 2) * _power(q, t.dq)
            if t.dp and t.dq:
                hpq = hpq + (t.coeff * t.dp * t.dq) * _power(p, t.dp - 1) * _power(q, t.dq - 1)
            if t.dq >= 2:
                hqq = hqq + (t.coeff * t.dq * (t.dq - 1)) * _power(p, t.dp) * _power(q, t.dq - 2)
        row_p = np.stack([hpp, hpq], axis=-1)
        row_q = np.stack([hpq, hqq], axis=-1)
        return np.stack([row_p, row_q], axis=-2)

    def quadratic_matrix(self) -> Optional[np.ndarray]:
        """Matriz simétrica H com H(x) = x·Hx, ou None se não for forma quadrática pura.

        Termos constantes são ignorados (cancelam na Hamiltoniana dupla).
        """
        hmat = np.zeros((2, 2))
        for t in self.terms:
            if t.degree == 0:
                continue
            if t.degree != 2:
                return None
            if t.dp == 2:
                hmat[0, 0] += t.coeff
            elif t.dq == 2:
                hmat[1, 1] += t.coeff
            else:
                hmat[0, 1] += t.coeff / 2.0
                hmat[1, 0] += t.coeff / 2.0
        return hmat

    def cubic_momentum_coefficient(self) -> Optional[float]:
        """Retorna c quando H = c·p³ (a menos de constante), senão None."""
        relevant = [t for t in self.terms if t.degree > 0]
        if len(relevant) == 1 and relevant[0].dp == 3 and relevant[0].dq == 0:
            return relevant[0].coeff
        return None


@dataclass(frozen=True)
class LindbladCoupling:
    """Operador de Lindblad linear L = l′·x̂ + i l″·x̂."""

    l_re: PhaseVector
    l_im: PhaseVector

    @classmethod
    def from_config(cls, fragment: Optional[Dict[str, Any]]) -> "LindbladCoupling":
        if fragment is None:
            fragment = {}
        if not isinstance(fragment, dict):
            raise ConfigError("acoplamento deve ser um objeto {l_re, l_im}", field="coupling")
        l_re = PhaseVector.from_sequence(fragment.get("l_re", [0.0, 0.0]), name="coupling.l_re")
        l_im = PhaseVector.from_sequence(fragment.get("l_im", [0.0, 0.0]), name="coupling.l_im")
        return cls(l_re, l_im)

    @classmethod
    def momentum(cls, strength: float) -> "LindbladCoupling":
        """L = l p̂."""
        return cls(PhaseVector(strength, 0.0), PhaseVector(0.0, 0.0))

    @classmethod
    def zero(cls) -> "LindbladCoupling":
        return cls(PhaseVector(0.0, 0.0), PhaseVector(0.0, 0.0))

    def to_config(self) -> Dict[str, List[float]]:
        return {"l_re": [self.l_re.p, self.l_re.q], "l_im": [self.l_im.p, self.l_im.q]}

    @property
    def gamma(self) -> float:
        return float(wedge(self.l_im.as_array(), self.l_re.as_array()))

    @property
    def lam(self) -> np.ndarray:
        return apply_J(self.l_re.as_array() + 1j * self.l_im.as_array())

    @property
    def strength(self) -> float:
        return float(np.sqrt(self.l_re.norm() ** 2 + self.l_im.norm() ** 2))

    def scaled_to(self, strength: float) -> "LindbladCoupling":
        """Mesma direção, intensidade |l| = strength."""
        norm = self.strength
        if norm == 0.0:
            raise ConfigError("acoplamento nulo não define direção para varredura em l", field="coupling")
        factor = strength / norm
        return LindbladCoupling(self.l_re.scaled(factor), self.l_im.scaled(factor))

    def is_hermitian(self) -> bool:
        return self.l_im.p == 0.0 and self.l_im.q == 0.0


def dissipation_coefficient(c: LindbladCoupling) -> float:
    """γ = l″ ∧ l′ (nulo para L hermitiano)."""
    return c.gamma


def lambda_vector(c: LindbladCoupling) -> np.ndarray:
    """λ = J(l′ + i l″)."""
    return c.lam


@dataclass(frozen=True)
class DoubleHamiltonian:
    """
    Hamiltoniana dupla 𝓗(x, y) = H(x − ½Jy) − H(x + ½Jy) − γ x·y e sua
    versão complexa 𝓗_c = 𝓗 − (i/2)[(λ′·y)² + (λ″·y)²].

    Com include_decoherence=False o fluxo é gerado apenas por 𝓗 (γ mantido):
    é o fluxo real da teoria perturbativa e a semente unitária do Newton.
    O integrando de decoerência continua disponível em deco_density.
    """

    hamiltonian: PolynomialHamiltonian
    coupling: LindbladCoupling
    include_decoherence: bool = True
    gamma: float = field(init=False)
    lambda_re: np.ndarray = field(init=False, repr=False, compare=False)
    lambda_im: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gamma", self.coupling.gamma)
        lam = self.coupling.lam
        object.__setattr__(self, "lambda_re", lam.real.copy())
        object.__setattr__(self, "lambda_im", lam.imag.copy())

    def real_part(self) -> "DoubleHamiltonian":
        return replace(self, include_decoherence=False)

    @property
    def has_decoherence(self) -> bool:
        return self.include_decoherence and bool(np.any(self.lambda_re) or np.any(self.lambda_im))

    def _tips(self, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        half_jy = 0.5 * apply_J(y)
        return x - half_jy, x + half_jy

    def half_hamiltonians(self, x, y) -> Tuple[np.ndarray, np.ndarray]:
        """(𝓗⁺, 𝓗⁻) = (H(x − ½Jy), H(x + ½Jy))."""
        x, y = as_vector(x), as_vector(y)
        x_minus, x_plus = self._tips(x, y)
        return self.hamiltonian.evaluate(x_minus), self.hamiltonian.evaluate(x_plus)

    def value(self, x, y) -> np.ndarray:
        x, y = as_vector(x), as_vector(y)
        h_plus, h_minus = self.half_hamiltonians(x, y)
        return h_plus - h_minus - self.gamma * dot(x, y)

    def deco_density(self, y) -> np.ndarray:
        """½[(λ′·y)² + (λ″·y)²], sem conjugação (analítico em y)."""
        y = as_vector(y)
        return 0.5 * (dot(self.lambda_re, y) ** 2 + dot(self.lambda_im, y) ** 2)

    def complex_value(self, x, y) -> np.ndarray:
        value = self.value(x, y)
        if not self.include_decoherence:
            return value
        return value - 1j * self.deco_density(y)

    def grad_x(self, x, y) -> np.ndarray:
        """∂𝓗/∂x = ∂𝓗_c/∂x = ∇H(x − ½Jy) − ∇H(x + ½Jy) − γy."""
        x, y = as_vector(x), as_vector(y)
        x_minus, x_plus = self._tips(x, y)
        return self.hamiltonian.gradient(x_minus) - self.hamiltonian.gradient(x_plus) - self.gamma * y

    def grad_y(self, x, y) -> np.ndarray:
        """∂𝓗/∂y = ½J[∇H(x − ½Jy) + ∇H(x + ½Jy)] − γx."""
        x, y = as_vector(x), as_vector(y)
        x_minus, x_plus = self._tips(x, y)
        total = self.hamiltonian.gradient(x_minus) + self.hamiltonian.gradient(x_plus)
        return 0.5 * apply_J(total) - self.gamma * x

    def grad_y_c(self, x, y) -> np.ndarray:
        grad = self.grad_y(x, y)
        if not self.include_decoherence:
            return grad
        y = as_vector(y)
        lam_re_y = dot(self.lambda_re, y)[..., None]
        lam_im_y = dot(self.lambda_im, y)[..., None]
        return grad - 1j * (lam_re_y * self.lambda_re + lam_im_y * self.lambda_im)

    def hess_x(self, x, y) -> np.ndarray:
        """∂²𝓗/∂x² = ∇²H(x − ½Jy) − ∇²H(x + ½Jy)."""
        x, y = as_vector(x), as_vector(y)
        x_minus, x_plus = self._tips(x, y)
        return self.hamiltonian.hessian(x_minus) - self.hamiltonian.hessian(x_plus)

    def vector_field(self, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(ẋ, ẏ) = (∂𝓗_c/∂y, −∂𝓗_c/∂x)."""
        return self.grad_y_c(x, y), -self.grad_x(x, y)


def eval_double_hamiltonian(dh: DoubleHamiltonian, x: VectorLike, y: VectorLike):
    return dh.value(x, y)


def eval_complex_double_hamiltonian(dh: DoubleHamiltonian, x: VectorLike, y: VectorLike):
    return dh.complex_value(x, y)


def grad_x_Hc(dh: DoubleHamiltonian, x: VectorLike, y: VectorLike) -> np.ndarray:
    return dh.grad_x(x, y)


def grad_y_Hc(dh: DoubleHamiltonian, x: VectorLike, y: VectorLike) -> np.ndarray:
    return dh.grad_y_c(x, y)


def hess_x_H(dh: DoubleHamiltonian, x: VectorLike, y: VectorLike) -> np.ndarray:
    return dh.hess_x(x, y)
