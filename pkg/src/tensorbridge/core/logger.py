"""core/logger.py

Logging du paquet : configuration globale, formatter JSON et jalons.

La console écrit sur stderr, stdout restant réservé au rapport JSON Lines
et aux sorties des démos. Seuls les handlers installés ici sont remplacés
lors d'une reconfiguration ; ceux de l'application hôte (ou de pytest)
restent en place.
"""

import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

LOG_LEVEL_ENV = "TB_LOG_LEVEL"
LOG_FORMAT_ENV = "TB_LOG_FORMAT"

PLAIN_FORMAT = "%(asctime)s [%(levelname)s] %(name)s - %(message)s"
DATE_FORMAT = "%Y-%m-%dT%H:%M:%S"

# Champs `extra` recopiés tels quels dans une ligne JSON
CONTEXT_FIELDS = ("phase", "backend", "op", "case")

_installed: List[logging.Handler] = []
_configured = False


def parse_level(value: Any, default: int = logging.INFO) -> int:
    """'debug', 'WARNING', 10... -> constante logging ; inconnu -> default."""
    if isinstance(value, int):
        return value
    level = logging.getLevelName(str(value).strip().upper())
    return level if isinstance(level, int) else default


class JsonLogFormatter(logging.Formatter):
    """Une ligne JSON par enregistrement, contexte harnais inclus."""

    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            "time": self.formatTime(record, DATE_FORMAT),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        payload.update({key: getattr(record, key) for key in CONTEXT_FIELDS if hasattr(record, key)})
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False, default=str)


def _formatter(fmt: str) -> logging.Formatter:
    if fmt.strip().lower() == "json":
        return JsonLogFormatter()
    return logging.Formatter(fmt=PLAIN_FORMAT, datefmt=DATE_FORMAT)


def reset_logging() -> None:
    """Retire les handlers posés par configure_logging()."""
    global _configured
    root = logging.getLogger()
    while _installed:
        handler = _installed.pop()
        root.removeHandler(handler)
        handler.close()
    _configured = False


def configure_logging(
    level: Any = "INFO",
    fmt: str = "plain",
    console_enabled: bool = True,
    file_enabled: bool = False,
    file_path: Optional[str] = None,
    force: bool = False,
) -> None:
    """
    Configure le logger racine.

    Sans force=True, seul le premier appel a un effet. TB_LOG_LEVEL et
    TB_LOG_FORMAT (plain|json) priment sur les arguments.
    """
    global _configured
    if _configured and not force:
        return
    reset_logging()

    log_level = parse_level(os.getenv(LOG_LEVEL_ENV) or level)
    formatter = _formatter(os.getenv(LOG_FORMAT_ENV) or fmt)

    handlers: List[logging.Handler] = []
    if console_enabled:
        handlers.append(logging.StreamHandler(stream=sys.stderr))
    if file_enabled and file_path:
        handlers.append(logging.FileHandler(file_path, encoding="utf-8"))

    root = logging.getLogger()
    root.setLevel(log_level)
    for handler in handlers:
        handler.setLevel(log_level)
        handler.setFormatter(formatter)
        root.addHandler(handler)
        _installed.append(handler)
    _configured = True


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


def log_phase(logger: logging.Logger, phase: str, message: str, **context: Any) -> None:
    """
    Jalon d'exécution (niveau INFO), repérable par son champ `phase`.

        log_phase(logger, "conformance.run", "120 cas", backend="tape")
    """
    extra = {key: value for key, value in context.items() if key in CONTEXT_FIELDS}
    extra["phase"] = phase
    logger.info(message, extra=extra)
