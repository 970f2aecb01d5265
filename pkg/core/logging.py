"""
core/logging.py — Logging setup for the sampler toolkit.

Call setup_logging() once in main.py before anything else.

Outputs:
  - Console (INFO+): one text line per record, run context appended as key=value
  - File (DEBUG+): JSON lines, rotating 10MB/5 backups → logs/fes.log

Usage anywhere in the codebase:
    import logging
    logger = logging.getLogger(__name__)
    logger.info("Experiment finished", extra={"sampler": "fes", "seed": 1, "omega": 0.61})

Context values may be numpy scalars or arrays; both files and console render them as
plain numbers. Nothing logged here ever reaches a chain file.
"""

from __future__ import annotations

import json
import logging
import logging.handlers
import time
from pathlib import Path
from typing import Any

import numpy as np

# Attributes every LogRecord carries; anything else came in through extra=
_STANDARD_ATTRS = frozenset(logging.makeLogRecord({}).__dict__) | {"message", "asctime", "taskName"}

# extra= keys echoed on the console, in this order
CONSOLE_CONTEXT = ("problem", "sampler", "seed", "iteration", "omega", "acceptance", "path")

_OWNED = "_fes_handler"


def _plain(value: Any) -> Any:
    """numpy / pathlib values → JSON-native ones."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _context(record: logging.LogRecord) -> dict[str, Any]:
    return {k: _plain(v) for k, v in record.__dict__.items() if k not in _STANDARD_ATTRS}


class JSONLineFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        line = {
            "ts": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime(record.created)),
            "level": record.levelname,
            "logger": record.name,
            "msg": record.getMessage(),
            **_context(record),
        }
        if record.exc_info:
            line["exc"] = self.formatException(record.exc_info)
        return json.dumps(line, default=str)


class ContextTextFormatter(logging.Formatter):
    """'12:00:01  INFO  experiments.runner  Experiment finished  sampler=fes seed=1'"""

    def __init__(self) -> None:
        super().__init__("%(asctime)s  %(levelname)-8s  %(name)-22s  %(message)s", "%H:%M:%S")

    def format(self, record: logging.LogRecord) -> str:
        text = super().format(record)
        context = _context(record)
        shown = []
        for key in CONSOLE_CONTEXT:
            if key not in context:
                continue
            value = context[key]
            if isinstance(value, float):
                value = f"{value:.4g}"
            elif isinstance(value, dict):
                value = ",".join(
                    f"{k}:{v:.3f}" if isinstance(v, float) else f"{k}:{v}" for k, v in value.items()
                )
            shown.append(f"{key}={value}")
        return f"{text}  {' '.join(shown)}" if shown else text


def _own(handler: logging.Handler) -> logging.Handler:
    setattr(handler, _OWNED, True)
    return handler


def setup_logging(
    log_level: str = "INFO",
    log_file: str | None = "logs/fes.log",
    console: bool = True,
) -> None:
    """
    Configure the root logger. Repeated calls replace the handlers installed by the
    previous call instead of stacking new ones.

    Args:
        log_level:  Minimum level for console output ("DEBUG", "INFO", "WARNING").
        log_file:   Rotating JSON-lines log file, or None for no file.
        console:    Whether to attach a console (stderr) handler.
    """
    level = getattr(logging, log_level.upper(), logging.INFO)
    root = logging.getLogger()
    root.setLevel(logging.DEBUG)  # handlers filter

    teardown_logging()

    log_path = Path(log_file) if log_file else None
    if log_path is not None:
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            log_path, maxBytes=10 * 1024 * 1024, backupCount=5, encoding="utf-8",
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(JSONLineFormatter())
        root.addHandler(_own(file_handler))

    if console:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(level)
        console_handler.setFormatter(ContextTextFormatter())
        root.addHandler(_own(console_handler))

    for noisy in ("matplotlib", "numba", "urllib3", "asyncio", "concurrent.futures"):
        logging.getLogger(noisy).setLevel(logging.WARNING)

    logging.getLogger(__name__).debug(
        "Logging initialized",
        extra={"log_file": str(log_path.resolve()) if log_path else None, "console_level": log_level},
    )


def teardown_logging() -> None:
    """Remove the handlers installed by setup_logging()."""
    root = logging.getLogger()
    for handler in [h for h in root.handlers if getattr(h, _OWNED, False)]:
        root.removeHandler(handler)
        handler.close()
