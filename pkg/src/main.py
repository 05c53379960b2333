"""
chord-wkb: linha de comando

    python src/main.py evolve  --config run.json [--method M] [--wigner] [--times 0,0.5]
    python src/main.py compare --config run.json --method-a complex_wkb --method-b exact_quadratic
    python src/main.py scaling --config run.json [--t-list ...] [--l-list ...]

Códigos de saída: 0 sucesso, 2 erro de configuração, 3 falha numérica.
"""
import argparse
import logging
import sys
from typing import List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from core.errors import ChordWKBError, ConfigError
from dynamics.action_cache import ActionCache
from dynamics.methods import MethodRunner
from dynamics.real_wkb import scaling_probe
from dynamics.workers import resolve_threads
from grids.grids_io import chord_to_wigner, read_config, write_document, write_grid, write_table
from settings.logging_setup import configure_logging
from settings.run_config import METHODS, OUTPUT_FORMATS, RunConfig

logger = logging.getLogger("chord_wkb_cli")

COMPARE_COLUMNS = ("row", "y_p", "y_q", "t", "abs_diff", "rel_diff", "phase_diff")
SCALING_COLUMNS = ("sweep", "t", "l", "delta_re", "delta_im", "abs_delta", "estimate", "deco")


def _float_list(raw: str, flag: str) -> List[float]:
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"lista de números inválida: {raw!r}", field=flag)


def output_path(base: str, kind: str, fmt: str, t: Optional[float] = None) -> str:
    """'-' escreve na saída padrão; senão <base>_<kind>[_t<t>].<fmt>."""
    if base == "-":
        return base
    suffix = "" if t is None else f"_t{t:g}"
    return f"{base}_{kind}{suffix}.{fmt}"


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    if getattr(args, "method", None):
        config = config.with_method(args.method)
    if args.times:
        config = config.with_times(_float_list(args.times, "--times"))
    if args.out or args.format:
        config = config.with_output(args.out, args.format)
    return config


# --------------------------------------------------------------------------
# Comandos
# --------------------------------------------------------------------------

def cmd_evolve(config: RunConfig, threads: int = 1, wigner: bool = False) -> List[str]:
    """Uma grade de cordas (e opcionalmente a de Wigner) por tempo pedido."""
    runner = MethodRunner(config, threads=threads)
    written = []
    for t in config.times:
        grid = runner.grid(t)
        path = output_path(config.output.path, "chord", config.output.format, t)
        write_grid(grid, path, config.output.format)
        written.append(path)
        if wigner:
            w = chord_to_wigner(grid)
            path = output_path(config.output.path, "wigner", config.output.format, t)
            write_grid(w, path, config.output.format)
            written.append(path)
        logger.info(f"t={t}: χ(0) = {grid.value_at_origin():.12g}")
    return written


def compare_rows(config: RunConfig, method_a: str, method_b: str, threads: int = 1):
    """Linhas por nó (|Δ|, |Δ|/|χ_b|, Δfase mod 2π) e o resumo max/mean/p95."""
    cache = ActionCache()
    runner_a = MethodRunner(config, method_a, threads, cache)
    runner_b = runner_a if method_b == method_a else MethodRunner(config, method_b, threads, cache)
    yp, yq = config.grid.axes(config.hbar)
    pp, qq = np.meshgrid(yp, yq, indexing="ij")
    nodes = np.stack([pp, qq], axis=-1).reshape(-1, 2)

    rows, abs_all, rel_all, phase_all = [], [], [], []
    for t in config.times:
        a = runner_a.chords(nodes, t)
        b = a if runner_b is runner_a else runner_b.chords(nodes, t)
        abs_diff = np.abs(a - b)
        scale = np.abs(b)
        rel_diff = np.where(scale > 0, abs_diff / np.where(scale > 0, scale, 1.0), abs_diff)
        phase_diff = np.abs(np.angle(np.where((a != 0) & (b != 0), a * np.conj(b), 1.0)))
        for k, node in enumerate(nodes):
            rows.append([str(len(rows)), node[0], node[1], t, abs_diff[k], rel_diff[k], phase_diff[k]])
        abs_all.append(abs_diff)
        rel_all.append(rel_diff)
        phase_all.append(phase_diff)

    stacks = [np.concatenate(v) for v in (abs_all, rel_all, phase_all)]
    for name, reduce in (("max", np.max), ("mean", np.mean), ("p95", lambda v: np.percentile(v, 95))):
        rows.append([name, None, None, None] + [float(reduce(v)) for v in stacks])
    logger.info(f"{method_a} × {method_b}: max |Δ| = {float(np.max(stacks[0])):.3e}, "
                f"max rel = {float(np.max(stacks[1])):.3e}")
    return rows


def cmd_compare(config: RunConfig, method_a: str, method_b: str, threads: int = 1) -> str:
    rows = compare_rows(config, method_a, method_b, threads)
    path = output_path(config.output.path, "compare", "csv")
    write_table(COMPARE_COLUMNS, rows, path)
    return path


def cmd_scaling(config: RunConfig, t_list: Optional[Sequence[float]] = None,
                l_list: Optional[Sequence[float]] = None, threads: int = 1):
    """Tabela ΔP das varreduras em t e |l| com os expoentes ajustados."""
    s = config.scaling
    y, x = config.scaling_point()
    report = scaling_probe(config.double_hamiltonian(), y, t_list or s.t_list, l_list or s.l_list,
                           config.hbar, x, t_ref=s.t_ref, l_ref=s.l_ref, numerics=config.numerics,
                           threads=threads)
    fmt = config.output.format
    path = output_path(config.output.path, "scaling", fmt)
    if fmt == "json":
        write_document(dict(report.to_dict(), metadata=config.metadata()), path)
    else:
        rows = [[r.sweep, r.t, r.l, r.delta.real, r.delta.imag, abs(r.delta), r.estimate, r.deco]
                for r in report.rows]
        for name, fit in (("fit_t", report.t_fit), ("fit_l", report.l_fit), ("fit_deco_t", report.deco_t_fit)):
            rows.append([name, None, None, fit.exponent, fit.residual, float(fit.points), None, None])
        write_table(SCALING_COLUMNS, rows, path)
    return report, path


# --------------------------------------------------------------------------
# Argumentos
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chord-wkb",
                                     description="Evolução de funções de cordas sob equação de Lindblad")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="documento JSON da execução")
    common.add_argument("--out", help="prefixo dos arquivos de saída ('-' para stdout)")
    common.add_argument("--format", choices=OUTPUT_FORMATS)
    common.add_argument("--times", help="lista t1,t2,... (substitui a configuração)")
    common.add_argument("--threads", type=int, default=None, help="0 = automático; padrão CHORDWKB_THREADS ou 1")
    common.add_argument("--log-level", default=None)
    common.add_argument("--log-file", default=None)

    sub = parser.add_subparsers(dest="command", required=True)
    evolve = sub.add_parser("evolve", parents=[common], help="grades de χ por tempo")
    evolve.add_argument("--method", choices=METHODS)
    evolve.add_argument("--wigner", action="store_true", help="também escreve a grade de Wigner")

    compare = sub.add_parser("compare", parents=[common], help="tabela de diferenças entre dois métodos")
    compare.add_argument("--method-a", choices=METHODS)
    compare.add_argument("--method-b", choices=METHODS)

    scaling = sub.add_parser("scaling", parents=[common], help="leis de escala de ΔP")
    scaling.add_argument("--t-list")
    scaling.add_argument("--l-list")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_file)
    try:
        config = _apply_overrides(read_config(args.config), args)
        threads = resolve_threads(args.threads)
        if args.command == "evolve":
            written = cmd_evolve(config, threads, args.wigner)
            logger.info(f"{len(written)} arquivo(s) escrito(s)")
        elif args.command == "compare":
            method_a = args.method_a or (config.compare[0] if config.compare else None)
            method_b = args.method_b or (config.compare[1] if config.compare else None)
            if method_a is None or method_b is None:
                raise ConfigError("informe --method-a e --method-b", field="compare")
            cmd_compare(config, method_a, method_b, threads)
        else:
            t_list = _float_list(args.t_list, "--t-list") if args.t_list else None
            l_list = _float_list(args.l_list, "--l-list") if args.l_list else None
            cmd_scaling(config, t_list, l_list, threads)
    except ConfigError as e:
        logger.error(f"Erro de configuração: {e}")
        return e.exit_code
    except ChordWKBError as e:
        logger.error(f"Falha: {e}")
        return e.exit_code
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
