"""
problems/export.py — Plain-text export of a synthetic dataset for audit.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from core.errors import ChainFileError

logger = logging.getLogger(__name__)


def write_dataset(problem, path: Path | str) -> Path:
    """Tab-delimited columns from problem.dataset(), '#' header naming the problem and seed."""
    path = Path(path)
    columns, rows = problem.dataset()
    header = f"{problem.target().label} seed={problem.seed}\n" + "\t".join(columns)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, rows, fmt="%.17g", delimiter="\t", header=header)
    except OSError as e:
        raise ChainFileError(f"could not write dataset: {e}", path) from e
    logger.debug("Dataset written", extra={"path": str(path), "rows": len(rows)})
    return path
