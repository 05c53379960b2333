"""
Trajetórias no espaço de fase duplo complexo.

Integra o fluxo de Hamilton de 𝓗_c (ou de 𝓗, no modo real) com RK4 de passo
fixo, resolve o problema de contorno "história de y" por Newton com Jacobiana
de diferenças finitas e acumula a ação complexa por Simpson composto.

Tudo é vetorizado: uma chamada resolve um lote inteiro de cordas (..., 2),
cada nó com sua própria máscara de convergência.
"""
import csv
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import simpson

from core.double_phase import DoubleHamiltonian, PhaseVector, as_vector, dot
from core.errors import (
    BranchTrackingError,
    ChordWKBError,
    ShootingError,
    TrajectoryDivergenceError,
)
from settings.numerics import NumericsSettings

logger = logging.getLogger("chord_wkb_dynamics")

_E0 = np.array([1.0, 0.0])
_E1 = np.array([0.0, 1.0])


@dataclass(frozen=True)
class DoublePhasePoint:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(as_vector(self.x), dtype=complex)
        y = np.asarray(as_vector(self.y), dtype=complex)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("ponto do espaço de fase duplo não finito")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.x.imag) <= tol) and np.all(np.abs(self.y.imag) <= tol))


# --------------------------------------------------------------------------
# Ações iniciais S₀(y): superfície lagrangiana x₀ = −∂S₀/∂y
# --------------------------------------------------------------------------

class InitialAction(ABC):
    """Ação inicial S₀(y), analítica em y complexo."""

    kind = "custom"

    @abstractmethod
    def value(self, y: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def gradient(self, y: np.ndarray) -> np.ndarray:
        ...

    @property
    def is_real(self) -> bool:
        """True quando S₀ é real para y real (história real bem definida)."""
        return False

    def surface_point(self, y) -> np.ndarray:
        return -self.gradient(np.asarray(y, dtype=complex))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind}


class PlaneWaveAction(InitialAction):
    """
    S₀(y) = −x·y: estado inicial do propagador misto.
    x pode ser um lote (..., 2) alinhado ao lote de cordas (um centro por nó).
    """

    kind = "plane_wave"

    def __init__(self, x):
        self.x = x
        self._x = np.asarray(as_vector(x), dtype=float)

    def value(self, y):
        y = as_vector(y)
        return -dot(self._x, y)

    def gradient(self, y):
        y = as_vector(y)
        return np.broadcast_to(-self._x, y.shape).astype(np.result_type(y, float))

    @property
    def is_real(self) -> bool:
        return True

    def describe(self):
        if self._x.ndim == 1:
            return {"kind": self.kind, "p": float(self._x[0]), "q": float(self._x[1])}
        return {"kind": self.kind, "points": self._x.tolist()}


class QuadraticFormAction(InitialAction):
    """S₀(y) = ½ yᵀAy + b·y + c com A simétrica complexa."""

    kind = "quadratic_form"

    def __init__(self, matrix, vector, scalar: complex = 0.0):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (2, 2) or not np.allclose(matrix, matrix.T, atol=1e-14):
            raise ValueError("matriz da forma quadrática deve ser simétrica 2×2")
        self.matrix = matrix
        self.vector = np.asarray(vector, dtype=complex).reshape(2)
        self.scalar = complex(scalar)

    def value(self, y):
        y = as_vector(y)
        ay = np.einsum("ij,...j->...i", self.matrix, y)
        return 0.5 * dot(y, ay) + dot(self.vector, y) + self.scalar

    def gradient(self, y):
        y = as_vector(y)
        return np.einsum("ij,...j->...i", self.matrix, y) + self.vector

    @property
    def is_real(self) -> bool:
        return not (np.any(self.matrix.imag) or np.any(self.vector.imag) or self.scalar.imag)

    def describe(self):
        return {
            "kind": self.kind,
            "matrix": [[[v.real, v.imag] for v in row] for row in self.matrix],
            "vector": [[v.real, v.imag] for v in self.vector],
            "scalar": [self.scalar.real, self.scalar.imag],
        }


class PolynomialAction(InitialAction):
    """S₀(y) = Σ c_ij y_p^i y_q^j com coeficientes complexos."""

    kind = "polynomial"

    def __init__(self, coefficients: Dict[Tuple[int, int], complex]):
        self.coefficients = {(int(i), int(j)): complex(c) for (i, j), c in coefficients.items() if c != 0}

    def value(self, y):
        y = as_vector(y)
        yp, yq = y[..., 0], y[..., 1]
        total = np.zeros(yp.shape, dtype=complex)
        for (i, j), c in self.coefficients.items():
            total = total + c * yp ** i * yq ** j
        return total

    def gradient(self, y):
        y = as_vector(y)
        yp, yq = y[..., 0], y[..., 1]
        gp = np.zeros(yp.shape, dtype=complex)
        gq = np.zeros(yq.shape, dtype=complex)
        for (i, j), c in self.coefficients.items():
            if i:
                gp = gp + c * i * yp ** (i - 1) * yq ** j
            if j:
                gq = gq + c * j * yp ** i * yq ** (j - 1)
        return np.stack([gp, gq], axis=-1)

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0.0 for c in self.coefficients.values())

    def describe(self):
        return {"kind": self.kind,
                "terms": [[i, j, c.real, c.imag] for (i, j), c in sorted(self.coefficients.items())]}


# --------------------------------------------------------------------------
# Registro de trajetória
# --------------------------------------------------------------------------

@dataclass
class TrajectoryRecord:
    """
    Trajetória integrada (ou lote de trajetórias) com as partes da ação.

    x, y têm forma (n_tempos, *lote, 2) quando os pontos foram guardados.
    dyn_action = ∫(x·∂𝓗/∂x − 𝓗)dτ e deco_integral = ½∫[(λ′·y)²+(λ″·y)²]dτ.
    jacobian é ∂y(t)/∂ȳ₀ no ponto convergido; sqrt_det é √det dessa matriz
    acompanhada continuamente em τ (presente só quando pedida).
    """

    t: float
    times: np.ndarray
    x0: np.ndarray
    y0: np.ndarray
    x_end: np.ndarray
    y_end: np.ndarray
    dyn_action: Any
    deco_integral: Any
    y_target: np.ndarray
    shoot_residual: Any
    tolerance: float
    x: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    jacobian: Optional[np.ndarray] = None
    sqrt_det: Optional[np.ndarray] = None
    iterations: int = 0
    include_decoherence: bool = True

    @property
    def batch_shape(self) -> Tuple[int, ...]:
        return self.y_target.shape[:-1]

    @property
    def solved(self) -> bool:
        return bool(np.all(np.asarray(self.shoot_residual) <= self.tolerance))

    @property
    def points(self) -> List[DoublePhasePoint]:
        if self.x is None or self.batch_shape != ():
            raise ValueError("pontos só disponíveis para registros de um único nó com pontos guardados")
        return [DoublePhasePoint(xk, yk) for xk, yk in zip(self.x, self.y)]

    def max_imag(self) -> float:
        if self.x is None:
            return float(max(np.max(np.abs(self.x_end.imag)), np.max(np.abs(self.y_end.imag))))
        return float(max(np.max(np.abs(self.x.imag)), np.max(np.abs(self.y.imag))))

    def to_csv(self, path: str) -> None:
        """Despeja τ e as partes real/imaginária de p, q, y_p, y_q."""
        if self.x is None or self.batch_shape != ():
            raise ValueError("to_csv exige registro de um único nó com pontos guardados")
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["tau", "re_p", "im_p", "re_q", "im_q", "re_yp", "im_yp", "re_yq", "im_yq"])
            for tau, xk, yk in zip(self.times, self.x, self.y):
                row = [tau]
                for v in (xk[0], xk[1], yk[0], yk[1]):
                    row.extend([v.real, v.imag])
                writer.writerow([repr(float(v)) for v in row])


# --------------------------------------------------------------------------
# Integração
# --------------------------------------------------------------------------

def _rk4_step(dh: DoubleHamiltonian, x, y, dt):
    k1x, k1y = dh.vector_field(x, y)
    k2x, k2y = dh.vector_field(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y)
    k3x, k3y = dh.vector_field(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y)
    k4x, k4y = dh.vector_field(x + dt * k3x, y + dt * k3y)
    x_new = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    y_new = y + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    return x_new, y_new


def _guard(x, y, bound: float, t: float) -> None:
    with np.errstate(invalid="ignore", over="ignore"):
        worst = max(np.max(np.abs(x), initial=0.0), np.max(np.abs(y), initial=0.0))
    if not np.isfinite(worst) or worst > bound:
        raise TrajectoryDivergenceError(
            f"trajetória divergiu (|componente| = {worst:.3e} > {bound:.1e})", t=t
        )


def _action_densities(dh: DoubleHamiltonian, x, y):
    """Integrandos (x·∂𝓗/∂x − 𝓗, ½[(λ′·y)²+(λ″·y)²])."""
    return dot(x, dh.grad_x(x, y)) - dh.value(x, y), dh.deco_density(y)


def _flow_endpoint(dh, x, y, t, steps, bound):
    dt = t / steps
    for _ in range(steps):
        x, y = _rk4_step(dh, x, y, dt)
        _guard(x, y, bound, t)
    return x, y


def _track_sqrt(previous_sq, previous_sign, current_sq):
    # troca de sinal quando z cruza o semieixo real negativo
    crossed = (previous_sq.real < 0) & (current_sq.real < 0) & (previous_sq.imag * current_sq.imag < 0)
    return np.where(crossed, -previous_sign, previous_sign)


def _flow_recorded(dh, x0, y0, t, steps, bound, store_points, stencil_step=None):
    """
    Integra guardando os integrandos da ação em todos os nós RK4.

    Com stencil_step, y0 tem forma (5, m, 2) (centro e ±h em cada direção) e
    det ∂y_τ/∂ȳ₀ é acompanhado a cada passo para a raiz contínua.
    """
    times = np.linspace(0.0, t, steps + 1)
    dt = t / steps
    x, y = x0, y0
    centre = (lambda a: a[0]) if stencil_step is not None else (lambda a: a)
    dyn_vals = np.empty((steps + 1,) + y0.shape[int(stencil_step is not None):-1], dtype=complex)
    deco_vals = np.empty_like(dyn_vals)
    xs = ys = None
    if store_points:
        xs = np.empty((steps + 1,) + centre(x0).shape, dtype=complex)
        ys = np.empty_like(xs)
    sign = sq_prev = None
    if stencil_step is not None:
        sq_prev = np.ones(dyn_vals.shape[1:], dtype=complex)
        sign = np.ones(dyn_vals.shape[1:])

    for k in range(steps + 1):
        if k:
            x, y = _rk4_step(dh, x, y, dt)
            _guard(x, y, bound, t)
            if stencil_step is not None:
                det = np.linalg.det(_stencil_jacobian(y, stencil_step))
                if np.any(np.abs(det) < 1e-12):
                    raise BranchTrackingError("det ∂y/∂ȳ₀ se anulou ao longo da trajetória", t=t)
                sign = _track_sqrt(sq_prev, sign, det)
                sq_prev = det
        dyn_vals[k], deco_vals[k] = _action_densities(dh, centre(x), centre(y))
        if store_points:
            xs[k], ys[k] = centre(x), centre(y)

    dyn = simpson(dyn_vals, x=times, axis=0)
    deco = simpson(deco_vals, x=times, axis=0)
    sqrt_det = None if sign is None else sign * np.sqrt(sq_prev)
    return times, centre(x), centre(y), dyn, deco, xs, ys, sqrt_det


def _stencil_jacobian(y_stencil, h):
    """Jacobiana [.., i, j] = ∂y_i/∂z_j a partir do estêncil central (5, m, 2)."""
    return np.stack([y_stencil[1] - y_stencil[2], y_stencil[3] - y_stencil[4]], axis=-1) / (2.0 * h)


def _stencil(z, h):
    return np.stack([z, z + h * _E0, z - h * _E0, z + h * _E1, z - h * _E1])


def _scalarize(value):
    value = np.asarray(value)
    return value[()] if value.ndim == 0 else value


def integrate_forward(dh: DoubleHamiltonian, start: DoublePhasePoint, t: float, steps: int,
                      divergence_bound: float = 1e8) -> TrajectoryRecord:
    """RK4 de passo fixo a partir de start; guarda todos os pontos intermediários."""
    if t < 0:
        raise ValueError("t deve ser não negativo")
    if steps < 1:
        raise ValueError("steps deve ser ≥ 1")
    x0, y0 = start.x, start.y
    if t == 0.0:
        times = np.zeros(1)
        xs, ys, x_end, y_end, dyn, deco = x0[None], y0[None], x0, y0, 0.0 + 0.0j, 0.0 + 0.0j
    else:
        times, x_end, y_end, dyn, deco, xs, ys, _ = _flow_recorded(
            dh, x0, y0, t, steps, divergence_bound, store_points=True
        )
    return TrajectoryRecord(
        t=t, times=times, x0=x0, y0=y0, x_end=x_end, y_end=y_end,
        dyn_action=_scalarize(dyn), deco_integral=_scalarize(deco),
        y_target=y_end, shoot_residual=0.0, tolerance=0.0, x=xs, y=ys,
        include_decoherence=dh.include_decoherence,
    )


# --------------------------------------------------------------------------
# Problema de contorno (tiro)
# --------------------------------------------------------------------------

@dataclass
class _NewtonResult:
    z: np.ndarray
    jacobian: np.ndarray
    residual: np.ndarray
    best_residual: np.ndarray
    converged: np.ndarray
    iterations: int


def _shooting_map(dh, s0, z, t, steps, numerics):
    stencil = _stencil(z, numerics.fd_step)
    x0 = -s0.gradient(stencil)
    _, y_end = _flow_endpoint(dh, x0, stencil, t, steps, numerics.divergence_bound)
    return y_end[0], _stencil_jacobian(y_end, numerics.fd_step)


def _newton(dh, s0, targets, seed, t, steps, numerics) -> _NewtonResult:
    n = targets.shape[0]
    z = np.array(seed, dtype=complex, copy=True)
    jac = np.zeros((n, 2, 2), dtype=complex)
    residual = np.full(n, np.inf)
    best = np.full(n, np.inf)
    active = np.ones(n, dtype=bool)
    iterations = 0

    for it in range(numerics.max_newton + 1):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        end, jac_idx = _shooting_map(dh, s0, z[idx], t, steps, numerics)
        mismatch = end - targets[idx]
        res = np.sqrt(np.sum(np.abs(mismatch) ** 2, axis=-1))
        residual[idx] = res
        best[idx] = np.minimum(best[idx], res)
        jac[idx] = jac_idx
        done = res <= numerics.shoot_tol
        active[idx[done]] = False
        logger.debug(f"Newton it={it} t={t}: {idx.size} nós ativos, resíduo máx {res.max():.3e}")
        if it == numerics.max_newton or np.all(done):
            break
        pending = ~done
        try:
            delta = np.linalg.solve(jac_idx[pending], -mismatch[pending][..., None])[..., 0]
        except np.linalg.LinAlgError:
            # nós singulares ficam parados e acabam reportados como não convergidos
            delta = np.zeros_like(mismatch[pending])
            for k, (a, b) in enumerate(zip(jac_idx[pending], mismatch[pending])):
                try:
                    delta[k] = np.linalg.solve(a, -b)
                except np.linalg.LinAlgError:
                    pass
        z[idx[pending]] += delta
        iterations = it + 1

    return _NewtonResult(z, jac, residual, best, ~active, iterations)


def _unitary_seed(dh, s0, targets, t, steps, numerics) -> np.ndarray:
    """Semente do Newton: solução da história unitária/real, ou o próprio alvo."""
    if not dh.has_decoherence:
        return targets.copy()
    try:
        seeded = _newton(dh.real_part(), s0, targets, targets, t, steps, numerics)
    except ChordWKBError as e:
        logger.warning(f"Semente unitária falhou ({e}); usando y alvo como semente")
        return targets.copy()
    if not np.all(seeded.converged):
        logger.warning(f"{int(np.sum(~seeded.converged))} nós sem semente unitária; usando y alvo")
    return np.where(seeded.converged[:, None], seeded.z, targets)


def solve_histories(dh: DoubleHamiltonian, s0: InitialAction, y_target, t: float,
                    numerics: Optional[NumericsSettings] = None, store_points: bool = False,
                    track_prefactor: bool = False, seed=None) -> TrajectoryRecord:
    """
    Resolve em lote as histórias que terminam em y_target (forma (..., 2)) no tempo t.

    Levanta ShootingError se algum nó não convergir, informando o pior resíduo.
    """
    numerics = numerics or NumericsSettings()
    if t < 0:
        raise ValueError("t deve ser não negativo")
    targets = np.asarray(y_target, dtype=complex)
    batch_shape = targets.shape[:-1]
    flat = targets.reshape(-1, 2)
    steps = numerics.steps_for(t)

    if steps == 0:
        x0 = -s0.gradient(flat)
        zeros = np.zeros(flat.shape[0], dtype=complex)
        eye = np.broadcast_to(np.eye(2, dtype=complex), (flat.shape[0], 2, 2))
        return _assemble(batch_shape, t, np.zeros(1), x0, flat, x0, flat, zeros, zeros, flat,
                         np.zeros(flat.shape[0]), numerics.shoot_tol,
                         x0[None] if store_points else None, flat[None] if store_points else None,
                         eye, np.ones(flat.shape[0], dtype=complex) if track_prefactor else None,
                         0, dh.include_decoherence)

    if seed is None:
        start = _unitary_seed(dh, s0, flat, t, steps, numerics)
    else:
        start = np.broadcast_to(np.asarray(seed, dtype=complex), targets.shape).reshape(-1, 2)
    result = _newton(dh, s0, flat, start, t, steps, numerics)
    if not np.all(result.converged):
        bad = int(np.argmax(np.where(result.converged, -np.inf, result.best_residual)))
        raise ShootingError(
            f"Newton não convergiu em {numerics.max_newton} iterações para "
            f"{int(np.sum(~result.converged))} nó(s)",
            best_residual=float(result.best_residual[bad]), chord=flat[bad], t=t,
        )

    y0 = result.z
    if track_prefactor:
        stencil = _stencil(y0, numerics.fd_step)
        times, x_end, y_end, dyn, deco, xs, ys, sqrt_det = _flow_recorded(
            dh, -s0.gradient(stencil), stencil, t, steps, numerics.divergence_bound,
            store_points, stencil_step=numerics.fd_step,
        )
    else:
        times, x_end, y_end, dyn, deco, xs, ys, sqrt_det = _flow_recorded(
            dh, -s0.gradient(y0), y0, t, steps, numerics.divergence_bound, store_points,
        )
    residual = np.sqrt(np.sum(np.abs(y_end - flat) ** 2, axis=-1))
    logger.debug(f"{flat.shape[0]} histórias resolvidas em t={t} ({result.iterations} iterações)")
    return _assemble(batch_shape, t, times, -s0.gradient(y0), y0, x_end, y_end, dyn, deco, flat,
                     residual, numerics.shoot_tol, xs, ys, result.jacobian, sqrt_det,
                     result.iterations, dh.include_decoherence)


def _assemble(batch_shape, t, times, x0, y0, x_end, y_end, dyn, deco, targets, residual, tol,
              xs, ys, jacobian, sqrt_det, iterations, include_decoherence) -> TrajectoryRecord:
    def vec(a):
        return a.reshape(batch_shape + (2,))

    def scal(a):
        return _scalarize(np.asarray(a).reshape(batch_shape))

    return TrajectoryRecord(
        t=t, times=times, x0=vec(x0), y0=vec(y0), x_end=vec(x_end), y_end=vec(y_end),
        dyn_action=scal(dyn), deco_integral=scal(deco), y_target=vec(targets),
        shoot_residual=scal(residual), tolerance=tol,
        x=None if xs is None else xs.reshape((len(times),) + batch_shape + (2,)),
        y=None if ys is None else ys.reshape((len(times),) + batch_shape + (2,)),
        jacobian=None if jacobian is None else np.asarray(jacobian).reshape(batch_shape + (2, 2)),
        sqrt_det=None if sqrt_det is None else scal(sqrt_det),
        iterations=iterations, include_decoherence=include_decoherence,
    )


def solve_history(dh: DoubleHamiltonian, s0: InitialAction, y_target, t: float,
                  numerics: Optional[NumericsSettings] = None, **kwargs) -> TrajectoryRecord:
    """História única: a trajetória de x₀ = −∂S₀/∂y(ȳ₀), y₀ = ȳ₀ que chega a y_target em t."""
    kwargs.setdefault("store_points", True)
    target = as_vector(y_target)
    if target.ndim != 1:
        raise ValueError("solve_history resolve um único nó; use solve_histories para lotes")
    return solve_histories(dh, s0, target, t, numerics, **kwargs)


def accumulate_action(rec: TrajectoryRecord, s0: InitialAction, hbar: float = 1.0):
    """S(y, t) = S₀(ȳ₀) + ∫(x·∂𝓗/∂x − 𝓗)dτ + i·½∫[(λ′·y)² + (λ″·y)²]dτ."""
    if hbar <= 0:
        raise ValueError("hbar deve ser positivo")
    if not rec.solved:
        worst = float(np.max(rec.shoot_residual))
        raise ShootingError("registro não resolvido dentro da tolerância", best_residual=worst, t=rec.t)
    return _scalarize(s0.value(rec.y0) + rec.dyn_action + 1j * rec.deco_integral)


_OFFSETS = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])


def _action_field(dh, s0, ys, t, h, numerics):
    """x_M = −∂S/∂y nos nós ys (n, 2), por diferenças centrais de accumulate_action."""
    stencil = ys[:, None, :] + h * _OFFSETS
    rec = solve_histories(dh, s0, stencil, t, numerics)
    s = np.asarray(accumulate_action(rec, s0))
    return -np.stack([(s[:, 0] - s[:, 1]) / (2 * h), (s[:, 2] - s[:, 3]) / (2 * h)], axis=-1)


def schwartz_probe(dh: DoubleHamiltonian, s0: InitialAction, y, t: float, h: float,
                   numerics: Optional[NumericsSettings] = None) -> Tuple[float, float]:
    """
    Defeitos das igualdades de Schwartz do campo x_M(y, t) = −∂S/∂y.

    x_M vem de diferenças centrais da ação acumulada num estêncil em y e t.
    Retorna (|∂p_M/∂y_q − ∂q_M/∂y_p|, |∂x_M/∂t − ∂_y[𝓗_c(x_M(y,t), y)]|),
    com a derivada em y total (x_M depende de y).
    """
    y = np.asarray(as_vector(y), dtype=float)
    ys = y + h * _OFFSETS
    x_m = _action_field(dh, s0, ys, t, h, numerics)
    dxm_dyp = (x_m[0] - x_m[1]) / (2 * h)
    dxm_dyq = (x_m[2] - x_m[3]) / (2 * h)
    sym_defect = abs(dxm_dyq[0] - dxm_dyp[1])

    energy = dh.complex_value(x_m, ys)
    total_grad = np.array([(energy[0] - energy[1]) / (2 * h), (energy[2] - energy[3]) / (2 * h)])

    centre = y[None]
    if t >= h:
        x_hi = _action_field(dh, s0, centre, t + h, h, numerics)[0]
        x_lo = _action_field(dh, s0, centre, t - h, h, numerics)[0]
        dxm_dt = (x_hi - x_lo) / (2 * h)
    else:
        x_0 = _action_field(dh, s0, centre, t, h, numerics)[0]
        x_1 = _action_field(dh, s0, centre, t + h, h, numerics)[0]
        x_2 = _action_field(dh, s0, centre, t + 2 * h, h, numerics)[0]
        dxm_dt = (-3.0 * x_0 + 4.0 * x_1 - x_2) / (2 * h)
    time_defect = float(np.sqrt(np.sum(np.abs(dxm_dt - total_grad) ** 2)))
    return float(sym_defect), time_defect
