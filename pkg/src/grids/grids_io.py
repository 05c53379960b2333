"""
Grades de cordas e de Wigner, transformadas discretas entre elas, pureza e E/S.

Convenção: χ(y) = ∫ exp(−i y·x/ħ) W(x) dx  e  W(x) = (2πħ)⁻² ∫ exp(i y·x/ħ) χ(y) dy.
Para n pontos com passo Δy, o eixo conjugado tem passo Δp = 2πħ/(nΔy) e origem
−(n//2)Δp; as fases de deslocamento tornam a ida e volta exata.
"""
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from core.errors import ConfigError, GridIOError, SupportTruncationError

logger = logging.getLogger("chord_wkb_grids")

CSV_COLUMNS = ("y_p", "y_q", "t", "re", "im", "abs", "phase")
WIGNER_CSV_COLUMNS = ("p", "q", "t", "w")
SUPPORT_THRESHOLD = 1e-10


def _check_axis(axis: np.ndarray, name: str) -> float:
    if axis.ndim != 1 or axis.size < 2:
        raise ValueError(f"eixo {name} precisa de ao menos dois pontos")
    steps = np.diff(axis)
    if np.any(steps <= 0):
        raise ValueError(f"eixo {name} deve ser estritamente crescente")
    if np.max(np.abs(steps - steps[0])) > 1e-9 * max(abs(steps[0]), 1.0):
        raise ValueError(f"eixo {name} deve ter espaçamento uniforme")
    return float(steps[0])


def uniform_axis(centre: float, halfwidth: float, n: int) -> np.ndarray:
    """n pontos em [centre − halfwidth, centre + halfwidth) com passo 2·halfwidth/n."""
    return centre - halfwidth + (2.0 * halfwidth / n) * np.arange(n)


@dataclass
class ChordGrid:
    yp: np.ndarray
    yq: np.ndarray
    samples: np.ndarray
    hbar: float
    t: float = 0.0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.yp = np.asarray(self.yp, dtype=float)
        self.yq = np.asarray(self.yq, dtype=float)
        self.samples = np.asarray(self.samples, dtype=complex)
        self.dyp = _check_axis(self.yp, "y_p")
        self.dyq = _check_axis(self.yq, "y_q")
        if self.samples.shape != (self.yp.size, self.yq.size):
            raise ValueError(f"amostras {self.samples.shape} incompatíveis com eixos ({self.yp.size}, {self.yq.size})")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("amostras não finitas na grade de cordas")

    def value_at_origin(self) -> complex:
        i = int(np.argmin(np.abs(self.yp)))
        j = int(np.argmin(np.abs(self.yq)))
        return complex(self.samples[i, j])


@dataclass
class WignerGrid:
    p: np.ndarray
    q: np.ndarray
    samples: np.ndarray
    hbar: float
    t: float = 0.0
    residual_imag: float = 0.0
    chord_origin: Tuple[float, float] = (0.0, 0.0)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        self.samples = np.asarray(self.samples)
        self.dp = _check_axis(self.p, "p")
        self.dq = _check_axis(self.q, "q")

    def total(self) -> float:
        return float(np.real(np.sum(self.samples)) * self.dp * self.dq)


def check_support(samples: np.ndarray, threshold: float = SUPPORT_THRESHOLD) -> None:
    """Bordas da grade devem ficar abaixo de threshold·max|amostras|."""
    mags = np.abs(samples)
    peak = mags.max()
    edge = max(mags[0, :].max(), mags[-1, :].max(), mags[:, 0].max(), mags[:, -1].max())
    if peak > 0 and edge > threshold * peak:
        raise SupportTruncationError(
            f"borda da grade {edge:.3e} excede {threshold:.0e} do pico {peak:.3e}; aumente a extensão"
        )


def _conjugate_axis(n: int, step: float, hbar: float) -> np.ndarray:
    dual = 2.0 * math.pi * hbar / (n * step)
    return (np.arange(n) - n // 2) * dual


def chord_to_wigner(g: ChordGrid, check: bool = True) -> WignerGrid:
    """W(x) = (2πħ)⁻² Σ exp(i y·x/ħ) χ(y) Δy_p Δy_q, por FFT com correções de fase."""
    if check:
        check_support(g.samples)
    hbar = g.hbar
    n_p, n_q = g.samples.shape
    p = _conjugate_axis(n_p, g.dyp, hbar)
    q = _conjugate_axis(n_q, g.dyq, hbar)
    jp, jq = np.arange(n_p), np.arange(n_q)

    shifted = g.samples * np.exp(1j * g.dyp * jp * p[0] / hbar)[:, None] \
        * np.exp(1j * g.dyq * jq * q[0] / hbar)[None, :]
    spectrum = np.fft.ifft2(shifted) * (n_p * n_q)
    spectrum *= np.exp(1j * g.yp[0] * p / hbar)[:, None] * np.exp(1j * g.yq[0] * q / hbar)[None, :]
    w = spectrum * g.dyp * g.dyq / (2.0 * math.pi * hbar) ** 2

    peak = np.max(np.abs(w))
    residual = float(np.max(np.abs(w.imag)))
    if peak > 0 and residual > 1e-6 * peak:
        logger.warning(f"Parte imaginária residual {residual:.2e} (pico {peak:.2e}); estado não hermitiano?")
    return WignerGrid(p, q, w.real.copy(), hbar, g.t, residual,
                      (float(g.yp[0]), float(g.yq[0])), dict(g.metadata))


def wigner_to_chord(w: WignerGrid, origin: Optional[Tuple[float, float]] = None) -> ChordGrid:
    """χ(y) = Σ exp(−i y·x/ħ) W(x) Δp Δq; por padrão reconstrói a grade de cordas de origem."""
    hbar = w.hbar
    n_p, n_q = w.samples.shape
    yp0, yq0 = origin if origin is not None else w.chord_origin
    dyp = 2.0 * math.pi * hbar / (n_p * w.dp)
    dyq = 2.0 * math.pi * hbar / (n_q * w.dq)
    yp = yp0 + dyp * np.arange(n_p)
    yq = yq0 + dyq * np.arange(n_q)
    kp, kq = np.arange(n_p), np.arange(n_q)

    shifted = w.samples * np.exp(-1j * yp0 * kp * w.dp / hbar)[:, None] \
        * np.exp(-1j * yq0 * kq * w.dq / hbar)[None, :]
    chi = np.fft.fft2(shifted)
    chi *= np.exp(-1j * yp * w.p[0] / hbar)[:, None] * np.exp(-1j * yq * w.q[0] / hbar)[None, :]
    return ChordGrid(yp, yq, chi * w.dp * w.dq, hbar, w.t, dict(w.metadata))


def purity(g: ChordGrid, check: bool = True) -> float:
    """Tr ρ² = (1/2πħ) Σ |χ|² Δy_p Δy_q."""
    if check:
        check_support(g.samples)
    return float(np.sum(np.abs(g.samples) ** 2) * g.dyp * g.dyq / (2.0 * math.pi * g.hbar))


def fringe_amplitude(w: WignerGrid, chord) -> float:
    """|Σ exp(−i y*·x/ħ) W(x) Δp Δq|: projeção de Fourier direta de W na corda y*."""
    yp, yq = float(chord[0]), float(chord[1])
    phase_p = np.exp(-1j * yp * w.p / w.hbar)
    phase_q = np.exp(-1j * yq * w.q / w.hbar)
    return float(abs(phase_p @ w.samples @ phase_q) * w.dp * w.dq)


# --------------------------------------------------------------------------
# Arquivos
# --------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _phase(z: np.ndarray) -> np.ndarray:
    """Fase em (−π, π]."""
    angle = np.angle(z)
    return np.where(angle <= -math.pi, angle + 2 * math.pi, angle)


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", newline="", encoding="utf-8"), True
    except OSError as e:
        raise GridIOError(f"não foi possível abrir {path}: {e}")


def write_grid(g: Union[ChordGrid, WignerGrid], path: str, fmt: str = "csv",
               metadata: Optional[Dict[str, Any]] = None) -> None:
    if fmt not in ("csv", "json"):
        raise ConfigError(f"formato desconhecido {fmt!r}", field="output.format")
    meta = dict(g.metadata)
    meta.update(metadata or {})
    handle, close = _open_out(path)
    try:
        if fmt == "csv":
            _write_csv(g, handle)
        else:
            json.dump(_grid_document(g, meta), handle, indent=1)
            handle.write("\n")
    except OSError as e:
        raise GridIOError(f"falha ao escrever {path}: {e}")
    finally:
        if close:
            handle.close()
    logger.info(f"Grade escrita em {path} ({fmt})")


def write_table(columns, rows, path: str) -> None:
    """Tabela CSV genérica; números com 17 dígitos significativos, texto como está."""
    handle, close = _open_out(path)
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([
                "" if v is None else v if isinstance(v, str) else _fmt(v)
                for v in row
            ])
    except OSError as e:
        raise GridIOError(f"falha ao escrever {path}: {e}")
    finally:
        if close:
            handle.close()


def write_document(document: Dict[str, Any], path: str) -> None:
    """Documento JSON genérico (relatórios); '-' escreve na saída padrão."""
    handle, close = _open_out(path)
    try:
        json.dump(document, handle, indent=1)
        handle.write("\n")
    except OSError as e:
        raise GridIOError(f"falha ao escrever {path}: {e}")
    finally:
        if close:
            handle.close()
    logger.info(f"Documento escrito em {path}")


def _write_csv(g, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    if isinstance(g, ChordGrid):
        writer.writerow(CSV_COLUMNS)
        mags = np.abs(g.samples)
        phases = _phase(g.samples)
        for i, yp in enumerate(g.yp):
            for j, yq in enumerate(g.yq):
                z = g.samples[i, j]
                writer.writerow([_fmt(yp), _fmt(yq), _fmt(g.t), _fmt(z.real), _fmt(z.imag),
                                 _fmt(mags[i, j]), _fmt(phases[i, j])])
    else:
        writer.writerow(WIGNER_CSV_COLUMNS)
        for i, p in enumerate(g.p):
            for j, q in enumerate(g.q):
                writer.writerow([_fmt(p), _fmt(q), _fmt(g.t), _fmt(np.real(g.samples[i, j]))])


def _grid_document(g, meta) -> Dict[str, Any]:
    if isinstance(g, ChordGrid):
        return {
            "kind": "chord_grid", "hbar": g.hbar, "t": g.t,
            "y_p": g.yp.tolist(), "y_q": g.yq.tolist(),
            "re": g.samples.real.tolist(), "im": g.samples.imag.tolist(),
            "metadata": meta,
        }
    return {
        "kind": "wigner_grid", "hbar": g.hbar, "t": g.t,
        "p": g.p.tolist(), "q": g.q.tolist(), "w": np.real(g.samples).tolist(),
        "residual_imag": g.residual_imag, "chord_origin": list(g.chord_origin),
        "metadata": meta,
    }


def read_grid(path: str, hbar: Optional[float] = None) -> Union[ChordGrid, WignerGrid]:
    """Lê uma grade escrita por write_grid (JSON, ou CSV de cordas com hbar informado)."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise GridIOError(f"não foi possível ler {path}: {e}")
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise GridIOError(f"JSON inválido em {path}, linha {e.lineno}: {e.msg}")
        return _grid_from_document(doc)
    return _chord_grid_from_csv(text, path, hbar)


def _grid_from_document(doc: Dict[str, Any]):
    try:
        if doc["kind"] == "chord_grid":
            samples = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
            return ChordGrid(doc["y_p"], doc["y_q"], samples, doc["hbar"], doc["t"], doc.get("metadata", {}))
        if doc["kind"] == "wigner_grid":
            return WignerGrid(doc["p"], doc["q"], np.asarray(doc["w"], dtype=float), doc["hbar"], doc["t"],
                              doc.get("residual_imag", 0.0), tuple(doc.get("chord_origin", (0.0, 0.0))),
                              doc.get("metadata", {}))
    except KeyError as e:
        raise GridIOError(f"campo ausente no documento de grade: {e}")
    except ValueError as e:
        raise GridIOError(f"documento de grade inválido: {e}")
    raise GridIOError(f"tipo de grade desconhecido: {doc.get('kind')!r}")


def _chord_grid_from_csv(text: str, path: str, hbar: Optional[float]) -> ChordGrid:
    rows = list(csv.reader(text.splitlines()))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise GridIOError(f"cabeçalho CSV inesperado em {path}: {rows[0] if rows else None}")
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:]])
    except ValueError as e:
        raise GridIOError(f"valor inválido em {path}: {e}")
    yp = np.unique(data[:, 0])
    yq = np.unique(data[:, 1])
    if data.shape[0] != yp.size * yq.size:
        raise GridIOError(f"{path}: {data.shape[0]} linhas não formam grade {yp.size}×{yq.size}")
    samples = (data[:, 3] + 1j * data[:, 4]).reshape(yp.size, yq.size)
    if hbar is None:
        raise GridIOError(f"{path}: CSV não guarda ħ; informe hbar")
    return ChordGrid(yp, yq, samples, hbar=hbar, t=float(data[0, 2]))


def read_config(path: str):
    """Lê e valida o documento de configuração de uma execução."""
    from settings.run_config import load_run_config
    return load_run_config(path)
