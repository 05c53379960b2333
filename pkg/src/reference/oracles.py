"""
Soluções de referência exatas e independentes.

- Caso quadrático: transporte clássico exato do χ₀ com amortecimento gaussiano.
- Caso cúbico H = c·p³, L = l p̂: forma fechada do termo gato, ponto de sela,
  quadratura bruta da representação integral em p e propagador misto exato.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad, quad_vec
from scipy.linalg import expm

from core.double_phase import J, LindbladCoupling, PhaseVector, PolynomialHamiltonian, as_vector
from core.errors import BranchTrackingError, ConfigError, QuadratureError
from states.initial_states import CatParams

logger = logging.getLogger("chord_wkb_oracles")


@dataclass(frozen=True)
class QuadraticModel:
    """H(x) = x·Hx com H simétrica real, mais o acoplamento de Lindblad."""

    hmat: np.ndarray
    coupling: LindbladCoupling

    def __post_init__(self):
        hmat = np.asarray(self.hmat, dtype=float)
        if hmat.shape != (2, 2) or np.max(np.abs(hmat - hmat.T)) > 1e-14:
            raise ConfigError("matriz da Hamiltoniana quadrática deve ser simétrica 2×2", field="hamiltonian")
        object.__setattr__(self, "hmat", hmat)

    @classmethod
    def from_hamiltonian(cls, hamiltonian: PolynomialHamiltonian, coupling: LindbladCoupling) -> "QuadraticModel":
        hmat = hamiltonian.quadratic_matrix()
        if hmat is None:
            raise ConfigError("Hamiltoniana não é forma quadrática pura", field="hamiltonian")
        return cls(hmat, coupling)

    def propagation_matrix(self, t: float) -> np.ndarray:
        """R_t = exp(2JHt)."""
        return expm(2.0 * t * J @ self.hmat)

    def history_start(self, y, t: float) -> np.ndarray:
        """ȳ₀ = e^{−γt} R_tᵀ y."""
        y = as_vector(y)
        return np.exp(-self.coupling.gamma * t) * (y @ self.propagation_matrix(t))

    def damping_matrix(self, t: float) -> np.ndarray:
        """G(t) = ∫₀ᵗ e^{−2γs} R_s M R_sᵀ ds, M = λ′λ′ᵀ + λ″λ″ᵀ; o fator é exp(−yᵀGy/2ħ)."""
        lam = self.coupling.lam
        m = np.outer(lam.real, lam.real) + np.outer(lam.imag, lam.imag)
        if t == 0.0 or not np.any(m):
            return np.zeros((2, 2))
        gamma = self.coupling.gamma

        def integrand(s):
            r = self.propagation_matrix(s)
            return np.exp(-2.0 * gamma * s) * (r @ m @ r.T)

        result, err = quad_vec(integrand, 0.0, t, epsabs=1e-13, epsrel=1e-12)
        logger.debug(f"G(t={t}) por quad_vec, erro estimado {err:.2e}")
        return 0.5 * (result + result.T)


def exact_quadratic_chord(m: QuadraticModel, chi0: Callable, y, t: float, hbar: float):
    """χ(y, t) = χ₀(e^{−γt}R_tᵀy) · exp(−yᵀG(t)y / 2ħ)."""
    if t < 0:
        raise ValueError("t deve ser não negativo")
    y = np.asarray(as_vector(y), dtype=float)
    if t == 0.0:
        return chi0(y)
    g = m.damping_matrix(t)
    damping = np.einsum("...i,ij,...j->...", y, g, y)
    return chi0(m.history_start(y, t)) * np.exp(-damping / (2.0 * hbar))


def _cubic_parts(cp: CatParams, l: float, y, t: float, c: float):
    y = as_vector(y)
    yp, yq = y[..., 0], y[..., 1]
    w = 1.0 + 3j * c * t * yq
    shifted = yp + cp.dQ
    return yp, yq, w, shifted


def exact_cubic_cat_chord(cp: CatParams, l: float, y, t: float, hbar: float, c: float = 1.0):
    """Forma fechada do termo |b⟩⟨a| evoluído por H = c·p³, L = l p̂ (raiz principal de 1+3icty_q)."""
    _, yq, w, shifted = _cubic_parts(cp, l, y, t, c)
    exponent = (
        (4 * cp.P ** 2 - shifted ** 2 - 4j * cp.P * shifted) / (4 * hbar * w)
        - (yq - cp.dP) ** 2 / (4 * hbar)
        - l ** 2 * t * yq ** 2 / (2 * hbar)
        - cp.P ** 2 / hbar
        - 1j * cp.Q * yq / hbar
        - 1j * c * t * yq ** 3 / (4 * hbar)
    )
    return np.exp(exponent) / np.sqrt(w)


def _continuous_sqrt(path: Callable[[float], np.ndarray], t: float, samples: int = 64) -> np.ndarray:
    """√w(t) acompanhando o ramo desde w(0) ao longo de s ∈ [0, t]."""
    previous = np.asarray(path(0.0), dtype=complex)
    sign = np.ones(previous.shape)
    for s in np.linspace(0.0, t, samples + 1)[1:]:
        current = np.asarray(path(s), dtype=complex)
        if np.any(np.abs(current) < 1e-12):
            raise BranchTrackingError("argumento da raiz passou por zero", t=float(s))
        crossed = (previous.real < 0) & (current.real < 0) & (previous.imag * current.imag < 0)
        sign = np.where(crossed, -sign, sign)
        previous = current
    return sign * np.sqrt(previous)


def cubic_saddle_point_chord(cp: CatParams, l: float, y, t: float, hbar: float, c: float = 1.0):
    """
    Ponto de sela da representação integral em p. O expoente ħ·g(p) é quadrático,
    g = (a p² + b p + c₀)/ħ com a = −(1+3icty_q); o ponto estacionário é
    p₀ = (P − (i/2)(y_p+ΔQ)) / (1+3icty_q).
    """
    y = as_vector(y)
    yp, yq = y[..., 0], y[..., 1]
    shifted = yp + cp.dQ
    a = -(1.0 + 3j * c * t * yq)
    b = 2 * cp.P - 1j * shifted
    c0 = -cp.P ** 2 - 1j * cp.Q * yq - (yq - cp.dP) ** 2 / 4
    root = _continuous_sqrt(lambda s: 1.0 + 3j * c * s * yq, t)
    p0 = -b / (2 * a)
    g0 = a * p0 ** 2 + b * p0 + c0
    unitary = -1j * c * t * yq ** 3 / (4 * hbar) - l ** 2 * t * yq ** 2 / (2 * hbar)
    # (πħ)^(-1/2) · √(πħ/(−a))
    return np.exp(g0 / hbar + unitary) / root


@dataclass(frozen=True)
class MomentumDelta:
    """Estado com W₀ = δ(x − x₀): ρ₀(p+y_q/2, p−y_q/2) = δ(p − p₀) e^{−i y_q q₀/ħ}."""

    x: PhaseVector


def numeric_cubic_chord(rho0_p_rep, l: float, y, t: float, hbar: float, c: float = 1.0,
                        interval: Optional[tuple] = None, scan_halfwidth: float = 40.0,
                        rel_tol: float = 1e-11):
    """
    Quadratura direta de
    χ(y,t) = ∫dp e^{−iy_p p/ħ} ρ₀(p+y_q/2, p−y_q/2) exp(−ict(3p²y_q + y_q³/4)/ħ − l²ty_q²/2ħ).

    rho0_p_rep é uma função (p′, p″) → complexo ou um MomentumDelta (resolvido
    analiticamente). O intervalo é truncado onde o envelope cai abaixo de 1e−14
    do pico, a partir de uma varredura em ±scan_halfwidth·√ħ.
    """
    y = np.asarray(as_vector(y), dtype=float)
    if y.ndim > 1:
        flat = y.reshape(-1, 2)
        values = [numeric_cubic_chord(rho0_p_rep, l, node, t, hbar, c, interval, scan_halfwidth, rel_tol)
                  for node in flat]
        return np.array(values, dtype=complex).reshape(y.shape[:-1])
    yp, yq = float(y[0]), float(y[1])
    damping = -1j * c * t * yq ** 3 / (4 * hbar) - l ** 2 * t * yq ** 2 / (2 * hbar)

    if isinstance(rho0_p_rep, MomentumDelta):
        p0, q0 = rho0_p_rep.x.p, rho0_p_rep.x.q
        return complex(np.exp(-1j * (yp * p0 + yq * q0 + 3 * c * t * yq * p0 ** 2) / hbar + damping))

    def integrand(p):
        return (np.exp(-1j * yp * p / hbar - 3j * c * t * yq * p ** 2 / hbar)
                * rho0_p_rep(p + yq / 2, p - yq / 2))

    if interval is None:
        reach = scan_halfwidth * np.sqrt(hbar)
        grid = np.linspace(-reach, reach, 8001)
        envelope = np.abs(integrand(grid))
        peak = envelope.max()
        if peak == 0.0:
            return 0.0j
        keep = np.nonzero(envelope >= 1e-14 * peak)[0]
        step = grid[1] - grid[0]
        lo, hi = grid[keep[0]] - step, grid[keep[-1]] + step
        if keep[0] == 0 or keep[-1] == grid.size - 1:
            raise QuadratureError("envelope não decai dentro da janela de varredura", chord=(yp, yq), t=t)
    else:
        lo, hi = interval

    total = 0.0j
    for part in (np.real, np.imag):
        value, err = quad(lambda p: float(part(integrand(p))), lo, hi,
                          epsabs=1e-15, epsrel=rel_tol, limit=400)
        if not np.isfinite(value) or err > 1e-9 * max(1.0, abs(value)):
            raise QuadratureError(f"quad não convergiu (erro estimado {err:.2e})", chord=(yp, yq), t=t)
        total += value if part is np.real else 1j * value
    return complex(total * np.exp(damping))


def exact_cubic_mixed_propagator(x: PhaseVector, l: float, y, t: float, hbar: float, c: float = 1.0):
    """R_x(y,t) = exp(−ict y_q³/4ħ − tl²y_q²/2ħ − (i/ħ)(y_q q + y_p p + 3ct y_q p²))."""
    y = as_vector(y)
    x = as_vector(x)
    yp, yq = y[..., 0], y[..., 1]
    p, q = x[..., 0], x[..., 1]
    return np.exp(-1j * c * t * yq ** 3 / (4 * hbar) - t * l ** 2 * yq ** 2 / (2 * hbar)
                  - 1j * (yq * q + yp * p + 3 * c * t * yq * p ** 2) / hbar)


def cubic_model_parameters(hamiltonian: PolynomialHamiltonian, coupling: LindbladCoupling):
    """Extrai (c, l) de H = c·p³, L = l p̂; ConfigError se o modelo não for dessa família."""
    c = hamiltonian.cubic_momentum_coefficient()
    if c is None:
        raise ConfigError("oráculos cúbicos exigem H = c·p³", field="hamiltonian")
    if not coupling.is_hermitian() or coupling.l_re.q != 0.0:
        raise ConfigError("oráculos cúbicos exigem l_im = 0 e l_re ∝ (1, 0)", field="coupling")
    return c, coupling.l_re.p
