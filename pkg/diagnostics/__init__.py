from diagnostics.autocorr import autocorrelation, corrected_standard_error, effective_sample_size, iat_sokal
from diagnostics.record import ChainRecord
from diagnostics.summary import (
    SummaryRow,
    count_modes,
    discard_burn_in,
    format_table,
    histogram,
    summarize,
)

__all__ = [
    "ChainRecord",
    "SummaryRow",
    "autocorrelation",
    "corrected_standard_error",
    "count_modes",
    "discard_burn_in",
    "effective_sample_size",
    "format_table",
    "histogram",
    "iat_sokal",
    "summarize",
]
