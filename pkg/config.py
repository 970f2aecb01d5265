"""
config.py — Process-wide settings.
Reads from .env at startup. Experiment parameters do NOT live here: they come from
experiment files (experiments/schema.py). This class only holds things that describe
the machine / session: where logs and runs go, how many worker threads to use.

Accessing config: instantiate Config() in main() and pass values down.
Do NOT use os.getenv() anywhere else in the codebase: go through this class.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

BASE_DIR = Path(__file__).parent


def _flag(name: str, default: str = "0") -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class Config:
    # ── Logging ───────────────────────────────────────────────────────────────
    LOG_LEVEL: str = os.getenv("FES_LOG_LEVEL", "INFO")
    LOG_FILE: str = os.getenv("FES_LOG_FILE", "logs/fes.log")

    # ── Outputs ───────────────────────────────────────────────────────────────
    # Relative output paths in experiment files resolve against this directory
    OUTPUT_DIR: Path = Path(os.getenv("FES_OUTPUT_DIR", "runs"))

    # ── Execution ─────────────────────────────────────────────────────────────
    # Default worker threads for the two-group parallel AIES variant.
    # Results never depend on this value (per-walker counter streams).
    WORKERS: int = int(os.getenv("FES_WORKERS", "1"))
    PROGRESS: bool = _flag("FES_PROGRESS")

    # ── Paths ─────────────────────────────────────────────────────────────────
    CONFIGS_DIR: Path = BASE_DIR / "configs"

    def validate(self) -> list[str]:
        """Return a list of invalid settings. Empty list means OK."""
        problems = []
        if self.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            problems.append(f"FES_LOG_LEVEL={self.LOG_LEVEL}")
        if self.WORKERS < 1:
            problems.append(f"FES_WORKERS={self.WORKERS}")
        return problems

    def status(self) -> dict[str, str]:
        """Show the resolved settings. Printed by `main.py info`."""
        return {
            "log_level": self.LOG_LEVEL,
            "log_file": self.LOG_FILE,
            "output_dir": str(self.OUTPUT_DIR),
            "workers": str(self.WORKERS),
            "progress": str(self.PROGRESS),
        }
