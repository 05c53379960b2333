"""
Modo WKB real (perturbativo em α): trajetórias reais de 𝓗, funcional de
decoerência, propagador misto R_x(y, t), propagação de estados por quadratura,
evolução gaussiana por expansão quadrática e o erro ΔP com as leis de escala.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import simpson

from core.double_phase import DoubleHamiltonian, PhaseVector, as_vector, dot
from core.errors import ExpansionInvalidError, QuadratureError
from dynamics.complex_wkb import ChordValue
from dynamics.trajectories import (
    InitialAction,
    PlaneWaveAction,
    TrajectoryRecord,
    solve_histories,
)
from dynamics.workers import map_chunks
from settings.numerics import NumericsSettings
from states.initial_states import GaussianState, GaussianWigner, StateSpec

logger = logging.getLogger("chord_wkb_dynamics")


@dataclass
class MixedPropagatorValue:
    x: Any
    y: Any
    t: float
    value: Any
    phase_action: Any
    deco: Any
    y0: Any = None


def _scalar(value):
    value = np.asarray(value)
    return value[()] if value.ndim == 0 else value


def real_history(dh: DoubleHamiltonian, source: Union[PhaseVector, InitialAction], y_target, t: float,
                 numerics: Optional[NumericsSettings] = None, store_points: Optional[bool] = None,
                 track_prefactor: bool = False) -> TrajectoryRecord:
    """História real do fluxo de 𝓗 (γ incluído, sem os termos de λ) que chega a y_target."""
    s0 = source if isinstance(source, InitialAction) else PlaneWaveAction(source)
    if not s0.is_real:
        raise ValueError("história real exige ação inicial real")
    y_target = np.asarray(as_vector(y_target))
    if np.iscomplexobj(y_target) and np.any(y_target.imag):
        raise ValueError("história real exige corda alvo real")
    if store_points is None:
        store_points = y_target.ndim == 1
    return solve_histories(dh.real_part(), s0, y_target.real, t, numerics,
                           store_points=store_points, track_prefactor=track_prefactor)


def decoherence_functional(rec: TrajectoryRecord, dh: DoubleHamiltonian):
    """½∫₀ᵗ[(λ′·ỹ)² + (λ″·ỹ)²]dτ ao longo da história real."""
    if rec.y is None or len(rec.times) < 2:
        return _scalar(np.real(rec.deco_integral))
    return _scalar(np.real(simpson(dh.deco_density(rec.y), x=rec.times, axis=0)))


def _real_actions(dh, s0, y, t, numerics, track_prefactor=False):
    rec = real_history(dh, s0, y, t, numerics, store_points=False, track_prefactor=track_prefactor)
    phase = np.real(s0.value(rec.y0) + rec.dyn_action)
    deco = np.real(rec.deco_integral)
    return rec, phase, deco


def chord_real_wkb(dh: DoubleHamiltonian, s0: InitialAction, y, t: float, hbar: float,
                   numerics: Optional[NumericsSettings] = None) -> ChordValue:
    """exp{(i/ħ)(ação real ao longo da história real) − (1/ħ)·decoerência}."""
    numerics = numerics or NumericsSettings()
    y = np.asarray(as_vector(y), dtype=float)
    van_vleck = numerics.prefactor == "van_vleck"
    rec, phase, deco = _real_actions(dh, s0, y, t, numerics, track_prefactor=van_vleck)
    prefactor = np.exp(dh.gamma * t) / rec.sqrt_det if van_vleck else 1.0
    value = prefactor * np.exp(1j * phase / hbar - deco / hbar)
    return ChordValue(y, t, _scalar(value), _scalar(phase + 1j * deco), _scalar(deco), _scalar(prefactor))


def mixed_propagator_batch(dh: DoubleHamiltonian, x, y, t: float, hbar: float,
                           numerics: Optional[NumericsSettings] = None, threads: int = 1):
    """
    R_x(y, t) em lote para pares (x, y) com broadcast. Retorna (valor, fase, deco, ȳ₀).
    """
    numerics = numerics or NumericsSettings()
    x = np.asarray(as_vector(x), dtype=float)
    y = np.asarray(as_vector(y), dtype=float)
    shape = np.broadcast_shapes(x.shape, y.shape)
    xs = np.broadcast_to(x, shape).reshape(-1, 2)
    ys = np.broadcast_to(y, shape).reshape(-1, 2)

    def block(b):
        s0 = PlaneWaveAction(xs[b])
        rec, phase, deco = _real_actions(dh, s0, ys[b], t, numerics)
        return phase, deco, rec.y0

    parts = map_chunks(block, xs.shape[0], numerics.chunk_size, threads)
    phase = np.concatenate([p[0] for p in parts]).reshape(shape[:-1])
    deco = np.concatenate([p[1] for p in parts]).reshape(shape[:-1])
    y0 = np.concatenate([p[2] for p in parts]).reshape(shape)
    value = np.exp(1j * phase / hbar - deco / hbar)
    return value, phase, deco, y0


def mixed_propagator(dh: DoubleHamiltonian, x: PhaseVector, y, t: float, hbar: float,
                     numerics: Optional[NumericsSettings] = None) -> MixedPropagatorValue:
    """R_x(y,t) = exp{(i/ħ)[S₀(ỹ₀) + ∫(x·∂𝓗/∂x − 𝓗)dτ] − (1/ħ)·decoerência}, S₀ = −x·y."""
    value, phase, deco, y0 = mixed_propagator_batch(dh, as_vector(x), y, t, hbar, numerics)
    return MixedPropagatorValue(x, np.asarray(y), t, _scalar(value), _scalar(phase), _scalar(deco), y0)


# --------------------------------------------------------------------------
# Propagação de estados
# --------------------------------------------------------------------------

def _gaussian_components(w0) -> List[Tuple[float, GaussianWigner]]:
    if isinstance(w0, GaussianWigner):
        return [(1.0, w0)]
    if isinstance(w0, GaussianState):
        return [(1.0, w0.wigner())]
    raise TypeError(f"estado inicial não suportado: {type(w0).__name__}")


def _legendre_box(lo, hi, n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (nodes + 1.0), half * weights


def _quadrature_sum(dh, comps, lo, hi, n, y, t, hbar, numerics, threads):
    p_nodes, p_w = _legendre_box(lo[0], hi[0], n)
    q_nodes, q_w = _legendre_box(lo[1], hi[1], n)
    pp, qq = np.meshgrid(p_nodes, q_nodes, indexing="ij")
    xs = np.stack([pp, qq], axis=-1).reshape(-1, 2)
    weights = np.outer(p_w, q_w).reshape(-1)
    w0 = sum(c * g.value(xs, hbar) for c, g in comps)
    r, _, _, _ = mixed_propagator_batch(dh, xs, y, t, hbar, numerics, threads)
    terms = weights * w0 * r
    return np.sum(terms), np.sum(np.abs(terms))


def propagate_state_via_mixed(dh: DoubleHamiltonian, w0, y, t: float, hbar: float,
                              numerics: Optional[NumericsSettings] = None, threads: int = 1):
    """
    χ(y, t) = ∫ W₀(x) R_x(y, t) dx.

    Estados analíticos (GaussianWigner, GaussianState, StateSpec): Gauss-Legendre 2D
    sobre a caixa dos centros ± quad_halfwidth·√ħ, com verificação dobrando os nós.
    WignerGrid: soma de Riemann nos nós da grade onde |W₀| ≥ 1e−12 do pico.
    """
    numerics = numerics or NumericsSettings()
    y = np.asarray(as_vector(y), dtype=float)
    if y.ndim > 1:
        flat = y.reshape(-1, 2)
        values = [propagate_state_via_mixed(dh, w0, node, t, hbar, numerics, threads) for node in flat]
        return np.array(values, dtype=complex).reshape(y.shape[:-1])

    from grids.grids_io import WignerGrid

    if isinstance(w0, WignerGrid):
        return _propagate_grid(dh, w0, y, t, hbar, numerics, threads)
    if isinstance(w0, StateSpec):
        comps = [(c.weight, c.wigner) for c in w0.components(hbar)]
        if any(g is None for _, g in comps):
            raise ValueError("onda plana não tem função de Wigner regular; use mixed_propagator")
    else:
        comps = _gaussian_components(w0)

    centres = np.array([g.centre.as_array() for _, g in comps])
    reach = numerics.quad_halfwidth * math.sqrt(hbar)
    lo, hi = centres.min(axis=0) - reach, centres.max(axis=0) + reach
    n = numerics.quad_nodes * max(1, math.ceil(float(np.max(hi - lo)) / (2 * reach)))

    coarse, _ = _quadrature_sum(dh, comps, lo, hi, n, y, t, hbar, numerics, threads)
    fine, scale = _quadrature_sum(dh, comps, lo, hi, 2 * n, y, t, hbar, numerics, threads)
    if abs(fine - coarse) > numerics.quad_tol * max(scale, 1e-300):
        raise QuadratureError(
            f"quadratura não convergiu: |Δ| = {abs(fine - coarse):.2e} com {n}→{2 * n} nós",
            chord=y, t=t,
        )
    return complex(fine)


def _propagate_grid(dh, grid, y, t, hbar, numerics, threads):
    pp, qq = np.meshgrid(grid.p, grid.q, indexing="ij")
    w = grid.samples
    keep = np.abs(w) >= 1e-12 * np.max(np.abs(w))
    xs = np.stack([pp[keep], qq[keep]], axis=-1)
    r, _, _, _ = mixed_propagator_batch(dh, xs, y, t, hbar, numerics, threads)
    dp, dq = grid.p[1] - grid.p[0], grid.q[1] - grid.q[0]
    return complex(np.sum(w[keep] * r) * dp * dq)


def gaussian_chord_evolution(dh: DoubleHamiltonian, X: Union[PhaseVector, GaussianWigner], y, t: float,
                             hbar: float, numerics: Optional[NumericsSettings] = None):
    """
    Integral gaussiana do propagador misto expandido até segunda ordem em x − X:

        χ ≈ e^{i(S + φ₀)/ħ} det(A)^(−1/2) exp(−bᵀA⁻¹b / 4ħ),
        A = 1 + (i/2)∂ȳ/∂x,  b = ȳ − k,

    com S = fase + i·decoerência das histórias reais de onda plana em X e
    ȳ = ỹ₀ − i∂(decoerência)/∂x, de modo que ∂S/∂x = −ȳ.
    Levanta ExpansionInvalidError se o termo cúbico na largura √ħ passar de 10% do quadrático.
    """
    numerics = numerics or NumericsSettings()
    g = X if isinstance(X, GaussianWigner) else GaussianWigner(X, np.zeros(2))
    centre = g.centre.as_array()
    y = np.asarray(as_vector(y), dtype=float)
    batch_shape = y.shape[:-1]
    ys = y.reshape(-1, 2)
    n = ys.shape[0]

    delta = 1e-4 * (1.0 + np.linalg.norm(centre))
    width = math.sqrt(hbar)
    s = width / 2
    outer = np.array([[0, 0], [delta, 0], [-delta, 0], [0, delta], [0, -delta],
                      [s, 0], [-s, 0], [0, s], [0, -s]], dtype=float)
    inner = np.array([[0, 0], [delta, 0], [-delta, 0], [0, delta], [0, -delta]], dtype=float)
    points = centre + outer[:, None, :] + inner[None, :, :]
    xs = np.broadcast_to(points[:, :, None, :], (9, 5, n, 2)).reshape(-1, 2)
    targets = np.broadcast_to(ys, (9, 5, n, 2)).reshape(-1, 2)
    rec, phase, deco = _real_actions(dh, PlaneWaveAction(xs), targets, t, numerics)
    phase = phase.reshape(9, 5, n)
    deco = deco.reshape(9, 5, n)
    grad_deco = np.stack([(deco[:, 1] - deco[:, 2]) / (2 * delta),
                          (deco[:, 3] - deco[:, 4]) / (2 * delta)], axis=-1)
    ybar = rec.y0.reshape(9, 5, n, 2)[:, 0] - 1j * grad_deco
    action = phase[0, 0] + 1j * deco[0, 0]

    jac = np.stack([(ybar[1] - ybar[2]) / (2 * delta), (ybar[3] - ybar[4]) / (2 * delta)], axis=-1)
    jac = 0.5 * (jac + np.swapaxes(jac, -1, -2))
    second = np.stack([(ybar[5] - 2 * ybar[0] + ybar[6]) / s ** 2,
                       (ybar[7] - 2 * ybar[0] + ybar[8]) / s ** 2])
    cubic_term = np.max(np.abs(second), axis=(0, 2)) * width ** 3 / (6 * hbar)
    quadratic_term = 1.0 + 0.5 * np.linalg.norm(jac, axis=(-2, -1))
    if np.any(cubic_term > 0.1 * quadratic_term):
        worst = int(np.argmax(cubic_term / quadratic_term))
        raise ExpansionInvalidError(
            f"termo cúbico {cubic_term[worst]:.3e} > 10% do quadrático {quadratic_term[worst]:.3e}",
            chord=ys[worst], t=t,
        )

    a = np.eye(2) + 0.5j * jac
    b = ybar[0] - g.k
    a_inv_b = np.linalg.solve(a, b[..., None])[..., 0]
    exponent = 1j * (action + g.phase0) / hbar - dot(b, a_inv_b) / (4 * hbar)
    value = np.exp(exponent) / np.sqrt(np.linalg.det(a))
    return _scalar(value.reshape(batch_shape))


def state_chord_via_gaussian(dh: DoubleHamiltonian, state: StateSpec, y, t: float, hbar: float,
                             numerics: Optional[NumericsSettings] = None):
    """Soma ponderada de gaussian_chord_evolution sobre os termos gaussianos do estado."""
    total = 0.0
    for c in state.components(hbar):
        if c.wigner is None:
            raise ValueError("onda plana não tem termo gaussiano")
        total = total + c.weight * gaussian_chord_evolution(dh, c.wigner, y, t, hbar, numerics)
    return total


# --------------------------------------------------------------------------
# Erro perturbativo ΔP e leis de escala
# --------------------------------------------------------------------------

def perturbation_error_estimate(dh: DoubleHamiltonian, y, t: float, hbar: float, x: PhaseVector,
                                numerics: Optional[NumericsSettings] = None) -> float:
    """
    ΔP ≈ (t³/6)[(λ′·y)² λ′ᵀ(∂²𝓗/∂x²)λ′ + (λ″·y)² λ″ᵀ(∂²𝓗/∂x²)λ″],
    com a Hessiana no início (x, ỹ₀) da história real de onda plana em x.
    """
    y = np.asarray(as_vector(y), dtype=float)
    rec = real_history(dh, x, y, t, numerics, store_points=False)
    hess = np.real(dh.hess_x(as_vector(x), rec.y0))
    total = 0.0
    for lam in (dh.lambda_re, dh.lambda_im):
        total += float(dot(lam, y)) ** 2 * float(lam @ hess @ lam)
    return t ** 3 / 6.0 * total


def measured_perturbation_error(dh: DoubleHamiltonian, x: PhaseVector, y, t: float,
                                numerics: Optional[NumericsSettings] = None) -> complex:
    """ΔP medido: S_complexa(y,t) − [S_real(y,t) + i·decoerência], ambos com S₀ = −x·y."""
    y = np.asarray(as_vector(y), dtype=float)
    s0 = PlaneWaveAction(x)
    rec_c = solve_histories(dh, s0, y, t, numerics)
    s_complex = s0.value(rec_c.y0) + rec_c.dyn_action + 1j * rec_c.deco_integral
    _, phase, deco = _real_actions(dh, s0, y, t, numerics)
    return complex(s_complex - (phase + 1j * deco))


@dataclass
class ScalingRow:
    sweep: str
    t: float
    l: float
    delta: complex
    estimate: float
    deco: float


@dataclass
class ScalingFit:
    exponent: Optional[float]
    residual: Optional[float]
    points: int


@dataclass
class ScalingReport:
    rows: List[ScalingRow] = field(default_factory=list)
    t_fit: Optional[ScalingFit] = None
    l_fit: Optional[ScalingFit] = None
    deco_t_fit: Optional[ScalingFit] = None

    def to_dict(self) -> Dict[str, Any]:
        rows = []
        for r in self.rows:
            row = asdict(r)
            row["delta"] = [r.delta.real, r.delta.imag]
            rows.append(row)
        return {
            "rows": rows,
            "t_fit": None if self.t_fit is None else asdict(self.t_fit),
            "l_fit": None if self.l_fit is None else asdict(self.l_fit),
            "deco_t_fit": None if self.deco_t_fit is None else asdict(self.deco_t_fit),
        }


def fit_power_law(xs: Sequence[float], values: Sequence[float], floor: float = 1e-10) -> ScalingFit:
    """Ajuste log-log; expoente indefinido (None) quando todos os valores estão abaixo de floor."""
    xs = np.asarray(xs, dtype=float)
    values = np.abs(np.asarray(values))
    usable = values >= floor
    if np.sum(usable) < 2:
        return ScalingFit(None, None, int(np.sum(usable)))
    lx, ly = np.log(xs[usable]), np.log(values[usable])
    coeffs = np.polyfit(lx, ly, 1)
    residual = float(np.sqrt(np.mean((np.polyval(coeffs, lx) - ly) ** 2)))
    return ScalingFit(float(coeffs[0]), residual, int(np.sum(usable)))


def scaling_probe(dh: DoubleHamiltonian, y, t_list: Sequence[float], l_list: Sequence[float], hbar: float,
                  x: PhaseVector, t_ref: float = 0.2, l_ref: float = 0.3,
                  numerics: Optional[NumericsSettings] = None, threads: int = 1) -> ScalingReport:
    """
    Mede ΔP varrendo t (com |l| = l_ref) e |l| (com t = t_ref), mantendo a direção
    do acoplamento, e ajusta os expoentes em t, em l e o da decoerência em t.
    Cada ponto da varredura é uma tarefa independente distribuída entre threads.
    """
    dh_ref = DoubleHamiltonian(dh.hamiltonian, dh.coupling.scaled_to(l_ref))
    tasks = [("t", dh_ref, t, l_ref) for t in t_list]
    tasks += [("l", DoubleHamiltonian(dh.hamiltonian, dh.coupling.scaled_to(l)), t_ref, l) for l in l_list]
    blocks = map_chunks(
        lambda b: [_scaling_row(sweep, model, x, y, t, l, hbar, numerics) for sweep, model, t, l in tasks[b]],
        len(tasks), 1, threads,
    )
    report = ScalingReport(rows=[row for block in blocks for row in block])

    t_rows = [r for r in report.rows if r.sweep == "t"]
    l_rows = [r for r in report.rows if r.sweep == "l"]
    report.t_fit = fit_power_law([r.t for r in t_rows], [r.delta for r in t_rows])
    report.l_fit = fit_power_law([r.l for r in l_rows], [r.delta for r in l_rows])
    report.deco_t_fit = fit_power_law([r.t for r in t_rows], [r.deco for r in t_rows])
    logger.info(f"Expoentes ajustados: t={report.t_fit.exponent}, l={report.l_fit.exponent}, "
                f"decoerência={report.deco_t_fit.exponent}")
    return report


def _scaling_row(sweep, dh, x, y, t, l, hbar, numerics) -> ScalingRow:
    delta = measured_perturbation_error(dh, x, y, t, numerics)
    estimate = perturbation_error_estimate(dh, y, t, hbar, x, numerics)
    rec = real_history(dh, x, np.asarray(as_vector(y), dtype=float), t, numerics)
    deco = float(decoherence_functional(rec, dh))
    logger.debug(f"ΔP[{sweep}] t={t} l={l}: medido {delta:.3e}, estimado {estimate:.3e}")
    return ScalingRow(sweep, float(t), float(l), delta, estimate, deco)


def grad_x_action_probe(dh: DoubleHamiltonian, X: PhaseVector, y, t: float, h: float,
                        numerics: Optional[NumericsSettings] = None) -> float:
    """|∂S/∂x + ȳ₀| com S a ação real do propagador misto e ∂S/∂x por diferenças centrais."""
    centre = as_vector(X).astype(float)
    y = np.asarray(as_vector(y), dtype=float)
    offsets = np.array([[0, 0], [h, 0], [-h, 0], [0, h], [0, -h]], dtype=float)
    xs = centre + offsets
    s0 = PlaneWaveAction(xs)
    _, phase, _ = _real_actions(dh, s0, np.broadcast_to(y, xs.shape), t, numerics)
    rec = real_history(dh, X, y, t, numerics, store_points=False)
    grad = np.array([(phase[1] - phase[2]) / (2 * h), (phase[3] - phase[4]) / (2 * h)])
    return float(np.linalg.norm(grad + np.real(rec.y0)))
