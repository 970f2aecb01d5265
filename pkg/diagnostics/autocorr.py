"""
diagnostics/autocorr.py — Autocorrelation, Sokal integrated autocorrelation time,
effective sample size and IAT-corrected standard errors. iat_lower_bound() bounds
chains too slow for a Sokal window.

Series are 1-D (one chain) or 2-D with shape (n, walkers). For ensembles the
per-walker ACFs are averaged before integration, and sample counts are totals over
all walkers.

ACF estimator: biased, mean-subtracted, normalized so rho(0) = 1. FFT for series of
length >= 4096, direct summation below.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from core.errors import ChainTooShortError, DegenerateSeriesError, InvalidArgumentError

FFT_THRESHOLD = 4096
DEFAULT_WINDOW_CONSTANT = 5.0


def _as_columns(series: np.ndarray) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] == 0 or x.shape[1] == 0:
        raise InvalidArgumentError(f"series must be 1-D or (n, walkers), got shape {np.shape(series)}")
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("series contains non-finite values")
    return x


def _next_pow_two(n: int) -> int:
    return 1 << max(n - 1, 0).bit_length()


def _acf_column(x: np.ndarray, max_lag: int) -> np.ndarray:
    n = x.shape[0]
    centred = x - x.mean()
    if n >= FFT_THRESHOLD:
        f = np.fft.rfft(centred, n=2 * _next_pow_two(n))
        acov = np.fft.irfft(f * np.conjugate(f))[: max_lag + 1]
    else:
        acov = np.correlate(centred, centred, mode="full")[n - 1 : n + max_lag]
    if acov[0] <= 0.0:
        raise DegenerateSeriesError("series has zero variance")
    return acov / acov[0]


def autocorrelation(series: np.ndarray, max_lag: Optional[int] = None) -> np.ndarray:
    """rho(0..max_lag). Default max_lag is n - 1."""
    x = _as_columns(series)
    n = x.shape[0]
    max_lag = n - 1 if max_lag is None else int(max_lag)
    if not 0 <= max_lag < n:
        raise InvalidArgumentError(f"max_lag must be in [0, {n - 1}], got {max_lag}")
    if np.any(np.ptp(x, axis=0) == 0.0):
        raise DegenerateSeriesError("series has zero variance")
    acfs = [_acf_column(x[:, k], max_lag) for k in range(x.shape[1])]
    return np.mean(acfs, axis=0)


def iat_sokal(series: np.ndarray, window_constant: float = DEFAULT_WINDOW_CONSTANT) -> float:
    """
    tau(W) = 1 + 2 sum_{k=1..W} rho(k), evaluated at the smallest W >= 1 with
    W >= window_constant * tau(W). Windows must stay below n / window_constant, so a
    series needs roughly window_constant^2 * tau samples; otherwise ChainTooShortError.
    """
    if window_constant <= 0:
        raise InvalidArgumentError("window_constant must be positive")
    x = _as_columns(series)
    n = x.shape[0]
    rho = autocorrelation(x, max_lag=min(n - 1, math.ceil(n / window_constant)))
    taus = 2.0 * np.cumsum(rho) - 1.0
    lags = np.arange(rho.shape[0])
    ok = (lags >= 1) & (lags >= window_constant * taus) & (lags < n / window_constant)
    if not np.any(ok):
        raise ChainTooShortError(
            f"no self-consistent window for a series of length {n} "
            f"(window constant {window_constant})"
        )
    return float(taus[int(np.argmax(ok))])



def iat_lower_bound(series: np.ndarray, window_constant: float = DEFAULT_WINDOW_CONSTANT) -> float:
    """
    tau(W) at the largest window iat_sokal may use, W < n / window_constant.

    For a chain too short for a self-consistent window and with a positive ACF this
    partial sum sits below the true IAT, so it bounds a slow chain from below.
    """
    if window_constant <= 0:
        raise InvalidArgumentError("window_constant must be positive")
    x = _as_columns(series)
    n = x.shape[0]
    window = math.ceil(n / window_constant) - 1
    if window < 1 or window >= n:
        raise ChainTooShortError(f"a series of length {n} has no admissible window")
    rho = autocorrelation(x, max_lag=window)
    return float(2.0 * np.sum(rho) - 1.0)


def effective_sample_size(series: np.ndarray, window_constant: float = DEFAULT_WINDOW_CONSTANT) -> float:
    """Total sample count / tau."""
    x = _as_columns(series)
    return x.size / iat_sokal(x, window_constant)


def corrected_standard_error(series: np.ndarray, window_constant: float = DEFAULT_WINDOW_CONSTANT) -> float:
    """Standard error of the mean inflated by the autocorrelation: sqrt(tau var / N)."""
    x = _as_columns(series)
    tau = iat_sokal(x, window_constant)
    return math.sqrt(tau * float(np.var(x)) / x.size)
