"""
core/errors.py — Exception hierarchy for the sampler toolkit.

Every error raised on purpose by this package derives from FESError, so the CLI
can report it with a one-line diagnostic and a nonzero exit code.
Each subclass also derives from the closest builtin, so callers that only know
about ValueError / OSError keep working.

Usage:
    from core.errors import OutOfDomainError
    raise OutOfDomainError(f"query {x} outside [{lo}, {hi}]")
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional


class FESError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgumentError(FESError, ValueError):
    """An argument violates a documented precondition."""


class OutOfDomainError(FESError, ValueError):
    """A field was evaluated outside the span of its grid."""


class NumericalError(FESError, ArithmeticError):
    """Linear algebra failed (non-symmetric kernel, eigensolver did not converge)."""


class DegenerateSeriesError(FESError, ValueError):
    """A chain observable has zero variance; its autocorrelation is undefined."""


class ChainTooShortError(FESError, ValueError):
    """No admissible Sokal window exists for the series length."""


class InitializationError(FESError, RuntimeError):
    """A walker started at a point with non-finite log-density."""


class ConfigurationError(FESError, ValueError):
    """An experiment file is invalid. `field` names the offending key."""

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class ChainFileError(FESError, OSError):
    """Reading or writing a chain file failed. `path` carries the file."""

    def __init__(self, message: str, path: Path | str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = Path(path)
