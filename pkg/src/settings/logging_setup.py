"""
Configuração de logging da aplicação
"""
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional

LOG_LEVEL_ENV = "CHORDWKB_LOG_LEVEL"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

PROJECT_LOGGERS = (
    "chord_wkb_cli", "chord_wkb_core", "chord_wkb_dynamics", "chord_wkb_oracles",
    "chord_wkb_states", "chord_wkb_grids", "chord_wkb_settings", "chord_wkb_workers",
    "chord_wkb_cache",
)


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> int:
    """
    Configura o logger raiz: stderr sempre, arquivo rotativo opcional.
    Nível: argumento, senão CHORDWKB_LOG_LEVEL, senão WARNING.
    """
    name = (level or os.environ.get(LOG_LEVEL_ENV) or "WARNING").upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        numeric = logging.WARNING

    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(RotatingFileHandler(
            log_file,
            maxBytes=10 * 1024 * 1024,  # 10 MB
            backupCount=5
        ))

    logging.basicConfig(level=numeric, format=LOG_FORMAT, handlers=handlers, force=True)

    for logger_name in PROJECT_LOGGERS:
        logging.getLogger(logger_name).setLevel(numeric)

    # Reduzir verbosidade de bibliotecas externas
    logging.getLogger('scipy').setLevel(logging.WARNING)
    return numeric
