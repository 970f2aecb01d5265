"""
experiments/chains.py — Chain files, acceptance logs, side tables and digests.

Chain file layout (tab-delimited text):

    # fes-chain 1
    # created: 2026-01-01T12:00:00 host=box
    # config: {"L": 20, "M": 10, ...}
    # omega: 0.61234
    # acceptance: {"aies": 0.41, "pcn": 0.2}
    # burn_in_fraction: 0.1
    # thin: 1
    iteration	walker	c	eta_1
    0	0	0.53...	-1.2...
    ...

Rows run iteration-major, walker-minor: one block of L rows per recorded iteration
(every thin-th, starting at 0). Floats carry 17 significant digits so a read-back
reproduces the written series exactly.
The `# created:` line is the only non-deterministic line in the file.
"""

from __future__ import annotations

import hashlib
import json
import logging
import socket
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from core.constants import Stage
from core.errors import ChainFileError
from diagnostics.record import ChainRecord

logger = logging.getLogger(__name__)

MAGIC = "# fes-chain 1"
CREATED_PREFIX = "# created:"
INDEX_COLUMNS = ("iteration", "walker")


@dataclass(eq=False)
class ChainFile:
    """A chain file read back: observables reshaped to (recorded rows, L) plus header metadata."""
    path: Path
    observables: dict[str, np.ndarray]
    walkers: int
    config: dict[str, Any] = field(default_factory=dict)
    omega: float = float("nan")
    acceptance: dict[str, float] = field(default_factory=dict)
    burn_in_fraction: float = 0.10
    thin: int = 1

    @property
    def names(self) -> list[str]:
        return list(self.observables)

    @property
    def iterations(self) -> int:
        first = next(iter(self.observables.values()), None)
        return 0 if first is None else (int(first.shape[0]) - 1) * self.thin


def _created_line() -> str:
    return f"{CREATED_PREFIX} {datetime.now().isoformat(timespec='seconds')} host={socket.gethostname()}"


def write_chain_file(path: Path | str, record: ChainRecord, config: dict[str, Any]) -> Path:
    path = Path(path)
    names = record.names
    n_rows = record.rows * record.walkers
    iteration = np.repeat(record.recorded_iterations(), record.walkers)
    walker = np.tile(np.arange(record.walkers), record.rows)
    columns = [iteration, walker] + [record.observables[name].reshape(n_rows) for name in names]
    table = np.column_stack(columns) if columns else np.empty((n_rows, 0))

    header = [
        MAGIC,
        _created_line(),
        f"# config: {json.dumps(config, sort_keys=True)}",
        f"# omega: {record.omega!r}",
        f"# acceptance: {json.dumps(record.acceptance_rates(), sort_keys=True)}",
        f"# burn_in_fraction: {record.burn_in_fraction!r}",
        f"# thin: {record.thin}",
        "\t".join(INDEX_COLUMNS + tuple(names)),
    ]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(header) + "\n")
            np.savetxt(fh, table, fmt=["%d", "%d"] + ["%.17g"] * len(names), delimiter="\t")
    except OSError as e:
        raise ChainFileError(f"could not write chain file: {e}", path) from e
    logger.debug("Chain file written", extra={"path": str(path), "rows": n_rows})
    return path


def read_chain_file(path: Path | str) -> ChainFile:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ChainFileError(f"could not read chain file: {e}", path) from e
    if not lines or lines[0] != MAGIC:
        raise ChainFileError("not a chain file (missing magic line)", path)

    meta: dict[str, str] = {}
    k = 0
    while k < len(lines) and lines[k].startswith("#"):
        key, _, value = lines[k][1:].partition(":")
        meta[key.strip()] = value.strip()
        k += 1
    if k == len(lines):
        raise ChainFileError("missing column header", path)
    columns = lines[k].split("\t")
    if tuple(columns[:2]) != INDEX_COLUMNS:
        raise ChainFileError(f"column header must start with {INDEX_COLUMNS}, got {columns[:2]}", path)

    try:
        table = np.loadtxt(lines[k + 1:], delimiter="\t", ndmin=2) if k + 1 < len(lines) else np.empty((0, len(columns)))
        config = json.loads(meta.get("config", "{}"))
        acceptance = json.loads(meta.get("acceptance", "{}"))
        omega = float(meta.get("omega", "nan"))
        burn_in = float(meta.get("burn_in_fraction", "0.1"))
        thin = int(meta.get("thin", "1"))
    except ValueError as e:
        raise ChainFileError(f"malformed chain file: {e}", path) from e
    if table.shape[1] != len(columns):
        raise ChainFileError(f"{table.shape[1]} data columns, header names {len(columns)}", path)

    walkers = int(table[:, 1].max()) + 1 if table.shape[0] else 0
    if walkers == 0 or table.shape[0] % walkers:
        raise ChainFileError("row count is not a multiple of the walker count", path)
    if thin < 1:
        raise ChainFileError(f"thin must be at least 1, got {thin}", path)
    rows = table.shape[0] // walkers
    expected_walker = np.tile(np.arange(walkers), rows)
    expected_iteration = np.repeat(np.arange(rows) * thin, walkers)
    if not (np.array_equal(table[:, 1], expected_walker) and np.array_equal(table[:, 0], expected_iteration)):
        raise ChainFileError("rows are not ordered iteration-major, walker-minor", path)

    observables = {
        name: table[:, 2 + j].reshape(rows, walkers) for j, name in enumerate(columns[2:])
    }
    return ChainFile(
        path=path,
        observables=observables,
        walkers=walkers,
        config=config,
        omega=omega,
        acceptance=acceptance,
        burn_in_fraction=burn_in,
        thin=thin,
    )


def write_acceptance_log(path: Path | str, record: ChainRecord) -> Path:
    """Per iteration: omega used and accepted-proposal counts per stage."""
    path = Path(path)
    stages = [s for s in Stage.ORDER if s in record.accepted]
    table = np.column_stack(
        [np.arange(1, record.iterations + 1), record.omega_history] + [record.accepted[s] for s in stages]
    ) if record.iterations else np.empty((0, 2 + len(stages)))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(
            path, table, delimiter="\t", comments="",
            fmt=["%d", "%.17g"] + ["%d"] * len(stages),
            header=f"# walkers={record.walkers}\n" + "\t".join(["iteration", "omega"] + stages),
        )
    except OSError as e:
        raise ChainFileError(f"could not write acceptance log: {e}", path) from e
    return path


def _save_table(path: Path | str, table: np.ndarray, fmt: list[str], header: str, what: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, table, fmt=fmt, delimiter="\t", comments="", header=header)
    except OSError as e:
        raise ChainFileError(f"could not write {what}: {e}", path) from e
    return path


def write_histogram(path: Path | str, counts: np.ndarray, edges: np.ndarray) -> Path:
    table = np.column_stack([edges[:-1], edges[1:], counts])
    return _save_table(path, table, ["%.17g", "%.17g", "%d"], "left\tright\tcount", "histogram")


def write_acf(path: Path | str, rho: np.ndarray, thin: int = 1) -> Path:
    """Walker-averaged ACF; lags in iterations."""
    table = np.column_stack([np.arange(rho.shape[0]) * thin, rho])
    return _save_table(path, table, ["%d", "%.17g"], "lag\tacf", "ACF")


def write_adapt_trace(path: Path | str, record: ChainRecord) -> Path:
    """Running variance estimates of the hybrid sampler, one row per recorded iteration."""
    if record.adapt_trace is None:
        raise ChainFileError("record has no variance trace", Path(path))
    names = [f"var_{name}" for name in record.adapt_names]
    table = np.column_stack([record.recorded_iterations(), record.adapt_trace])
    header = f"# walkers={record.walkers}\n" + "\t".join(["iteration"] + names)
    return _save_table(path, table, ["%d"] + ["%.17g"] * len(names), header, "variance trace")


def write_path_quantiles(
    path: Path | str,
    times: np.ndarray,
    mean: np.ndarray,
    quantiles: np.ndarray,
    levels: Sequence[float],
    n_paths: int,
) -> Path:
    names = ["t", "mean"] + [f"q{round(100 * level):02d}" for level in levels]
    table = np.column_stack([times, mean, quantiles])
    header = f"# paths={n_paths}\n" + "\t".join(names)
    return _save_table(path, table, ["%.17g"] * len(names), header, "path quantiles")


def write_conditional_fields(path: Path | str, grid: np.ndarray, fields: Mapping[float, np.ndarray]) -> Path:
    """Long format: one row per (c, sample, x)."""
    blocks = [
        np.column_stack([np.full(grid.size, c), np.full(grid.size, k), grid, sample])
        for c, samples in fields.items()
        for k, sample in enumerate(samples)
    ]
    table = np.vstack(blocks) if blocks else np.empty((0, 4))
    return _save_table(path, table, ["%.17g", "%d", "%.17g", "%.17g"], "c\tsample\tx\trho0", "conditional fields")


def chain_digest(path: Path | str, include_header: bool = True) -> str:
    """SHA-256 of the file without its `# created:` line (without every '#' line if not include_header)."""
    path = Path(path)
    digest = hashlib.sha256()
    try:
        with path.open("rb") as fh:
            for line in fh:
                if line.startswith(CREATED_PREFIX.encode()):
                    continue
                if not include_header and line.startswith(b"#"):
                    continue
                digest.update(line)
    except OSError as e:
        raise ChainFileError(f"could not read chain file: {e}", path) from e
    return digest.hexdigest()


def load_center(path: Optional[Path | str]) -> Optional[tuple[float, ...]]:
    """Whitespace-separated numbers: scalars first, then leading whitened coefficients."""
    if path is None:
        return None
    path = Path(path)
    try:
        values = np.loadtxt(path, ndmin=1, comments="#").ravel()
    except (OSError, ValueError) as e:
        raise ChainFileError(f"could not read center file: {e}", path) from e
    return tuple(float(v) for v in values)
