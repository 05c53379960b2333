"""
Distribuição de nós de grade entre threads.
A ordem dos resultados é sempre a ordem dos blocos, independente do número de threads.
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

import psutil

from core.errors import ConfigError

logger = logging.getLogger("chord_wkb_workers")

T = TypeVar("T")

THREADS_ENV = "CHORDWKB_THREADS"


def resolve_threads(requested: Optional[int] = None) -> int:
    """
    Resolve o número de threads: argumento explícito, senão CHORDWKB_THREADS, senão 1.
    0 significa automático (núcleos físicos via psutil, limitado a 12).
    """
    if requested is None:
        raw = os.environ.get(THREADS_ENV)
        if raw is None or raw.strip() == "":
            return 1
        try:
            requested = int(raw)
        except ValueError:
            raise ConfigError(f"valor inválido {raw!r}", field=THREADS_ENV)
    if requested < 0:
        raise ConfigError("número de threads não pode ser negativo", field="threads")
    if requested == 0:
        cpu_count = psutil.cpu_count(logical=False) or os.cpu_count() or 4
        requested = min(12, cpu_count)
        logger.info(f"Threads automáticas: {requested}")
    return requested


def chunk_bounds(total: int, chunk_size: int) -> List[slice]:
    return [slice(start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)]


def map_chunks(func: Callable[[slice], T], total: int, chunk_size: int, threads: int = 1) -> List[T]:
    """Aplica func a cada bloco [start, stop) e devolve os resultados em ordem."""
    bounds = chunk_bounds(total, chunk_size)
    if threads <= 1 or len(bounds) <= 1:
        return [func(b) for b in bounds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, bounds))
