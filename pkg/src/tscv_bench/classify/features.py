"""Per-timestamp feature windows.

Each time step t becomes one sample whose features are the m-channel
observation window ending at t, with a fixed lookback. The first lookback-1
positions pad on the left by replicating the earliest observation, so every
sample's features depend only on observations at or before t; the test block
can never leak into training features.
"""

from __future__ import annotations

import numpy as np

from ..core import MultivariateSeries

# Observation window ending at each classified time step, in samples.
WINDOW_LOOKBACK = 16


def build_windows(series: MultivariateSeries, lookback: int = WINDOW_LOOKBACK) -> np.ndarray:
    """All per-timestamp windows of the series, shape (length, m, lookback)."""
    if lookback < 1:
        raise ValueError(f"lookback must be >= 1, got {lookback}")
    values = series.values
    padded = np.concatenate(
        [np.repeat(values[:, :1], lookback - 1, axis=1), values], axis=1
    )
    windows = np.lib.stride_tricks.sliding_window_view(padded, lookback, axis=1)
    # (m, length, lookback) -> (length, m, lookback), materialized once.
    return np.ascontiguousarray(windows.transpose(1, 0, 2))


def flatten_windows(windows: np.ndarray) -> np.ndarray:
    """Flatten (n, m, w) windows into an (n, m*w) feature matrix."""
    n = windows.shape[0]
    return windows.reshape(n, -1)
