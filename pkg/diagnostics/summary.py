"""
diagnostics/summary.py — Burn-in removal, histograms and the per-observable table.

summarize() produces one row per observable (tau, N_eff, SE, mean) after burn-in;
format_table() renders the rows plus per-stage acceptance rates as plain text.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

import numpy as np
from scipy.signal import find_peaks

from core.errors import ChainTooShortError, DegenerateSeriesError, InvalidArgumentError
from diagnostics.autocorr import corrected_standard_error, iat_lower_bound, iat_sokal
from diagnostics.record import SeriesSource

logger = logging.getLogger(__name__)


def discard_burn_in(series: np.ndarray, fraction: float = 0.10) -> np.ndarray:
    """Drop the first floor(fraction * rows) rows."""
    if not 0.0 <= fraction < 1.0:
        raise InvalidArgumentError(f"burn-in fraction must be in [0, 1), got {fraction}")
    series = np.asarray(series)
    return series[int(fraction * series.shape[0]):]


def histogram(series: np.ndarray, bins: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Counts and bin edges over all walkers."""
    if bins < 1:
        raise InvalidArgumentError("bins must be positive")
    return np.histogram(np.asarray(series, dtype=float).ravel(), bins=bins)


def count_modes(counts: np.ndarray, min_gap: int = 3, min_prominence: float = 0.05) -> int:
    """
    Local maxima of a bin-count histogram at least min_gap bins apart and standing at
    least min_prominence * max(counts) above the surrounding valleys.
    """
    counts = np.asarray(counts, dtype=float)
    if counts.size == 0 or counts.max() <= 0:
        return 0
    # pad so a maximum in the first or last bin still counts as a peak
    padded = np.concatenate([[0.0], counts, [0.0]])
    peaks, _ = find_peaks(padded, distance=max(int(min_gap), 1), prominence=min_prominence * counts.max())
    return int(peaks.size)


@dataclass(frozen=True)
class SummaryRow:
    observable: str
    iat: float
    ess: float
    se: float
    mean: float
    iat_floor: float = math.nan


def summarize(
    record: SeriesSource,
    observables: Optional[Iterable[str]] = None,
    burn_in_fraction: Optional[float] = None,
) -> list[SummaryRow]:
    """
    One row per observable after burn-in. A series that is too short for the Sokal
    window or constant gets NaN diagnostics instead of aborting the table; a too-short
    one also gets iat_floor, the IAT lower bound at the largest admissible window.
    IATs are in iterations: estimates on thinned rows are scaled by record.thin.
    """
    fraction = record.burn_in_fraction if burn_in_fraction is None else burn_in_fraction
    names = list(observables) if observables is not None else record.names
    rows = []
    for name in names:
        if name not in record.observables:
            raise InvalidArgumentError(f"observable '{name}' is not in the record (have {record.names})")
        kept = discard_burn_in(record.observables[name], fraction)
        try:
            tau_rows = iat_sokal(kept)
            se = corrected_standard_error(kept)
            ess = kept.size / tau_rows
            tau = tau_rows * record.thin
        except (ChainTooShortError, DegenerateSeriesError) as e:
            logger.warning("IAT unavailable", extra={"observable": name, "reason": str(e)})
            tau = ess = se = math.nan
        floor = math.nan
        if math.isnan(tau):
            try:
                floor = iat_lower_bound(kept) * record.thin
            except (ChainTooShortError, DegenerateSeriesError):
                pass
        rows.append(SummaryRow(name, tau, ess, se, float(np.mean(kept)), floor))
    return rows


def format_table(
    rows: list[SummaryRow],
    acceptance: Mapping[str, float],
    omega: Optional[float] = None,
) -> str:
    lines = [f"{'observable':<14}{'iat':>14}{'n_eff':>14}{'se':>14}{'mean':>14}"]
    for row in rows:
        iat = f">{row.iat_floor:.4g}" if math.isnan(row.iat) and not math.isnan(row.iat_floor) else f"{row.iat:.4g}"
        lines.append(
            f"{row.observable:<14}{iat:>14}{row.ess:>14.4g}{row.se:>14.4g}{row.mean:>14.6g}"
        )
    lines.append("")
    for stage, rate in acceptance.items():
        lines.append(f"acceptance[{stage}] = {rate:.4f}")
    if omega is not None:
        lines.append(f"omega = {omega:.6g}")
    return "\n".join(lines) + "\n"
