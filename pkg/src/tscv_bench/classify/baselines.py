"""Label-free baselines: the majority prior and the residual-threshold detector."""

from __future__ import annotations

import numpy as np

from .base import as_windows, check_feature_shape


def residual_score(observed: np.ndarray, predicted: np.ndarray) -> float:
    """Cumulative deviation between observed and predicted vectors.

    Sums the per-time-step Euclidean norm of the difference over the window;
    flagging happens by comparing against a threshold elsewhere.
    """
    observed = np.asarray(observed, dtype=np.float64)
    predicted = np.asarray(predicted, dtype=np.float64)
    if observed.shape != predicted.shape:
        raise ValueError(
            f"observed shape {observed.shape} != predicted shape {predicted.shape}"
        )
    if observed.ndim == 1:
        observed = observed[np.newaxis, :]
        predicted = predicted[np.newaxis, :]
    deviations = np.linalg.norm(observed - predicted, axis=0)
    return float(deviations.sum())


def window_residuals(windows: np.ndarray) -> np.ndarray:
    """Persistence-predictor residual of every window.

    The expected value of each step is the previous observation, so the
    window's residual is the summed Euclidean norm of its first differences.
    """
    diffs = np.diff(windows, axis=2)
    return np.linalg.norm(diffs, axis=1).sum(axis=1)


class MajorityPrior:
    """Scores every sample with the training positive-class frequency."""

    def __init__(self) -> None:
        self.prior: float | None = None
        self._shape: tuple[int, int] | None = None

    def fit(self, windows: np.ndarray, labels: np.ndarray, rng: np.random.Generator) -> None:
        windows = as_windows(windows)
        self.prior = float(np.mean(labels))
        self._shape = windows.shape[1:]

    def scores(self, windows: np.ndarray) -> np.ndarray:
        windows = as_windows(windows)
        check_feature_shape(self._shape, windows)
        return np.full(windows.shape[0], self.prior)


class ResidualThreshold:
    """Flags windows whose cumulative persistence residual is unusually large.

    The reference threshold is the 95th percentile of training-window
    residuals; scores are residual / threshold clipped to [0, 1] so they rank
    like the other classifiers' outputs. Labels are never consulted.
    """

    REFERENCE_PERCENTILE = 95.0

    def __init__(self) -> None:
        self.tau_ref: float | None = None
        self._shape: tuple[int, int] | None = None

    def fit(self, windows: np.ndarray, labels: np.ndarray, rng: np.random.Generator) -> None:
        windows = as_windows(windows)
        residuals = window_residuals(windows)
        self.tau_ref = float(np.percentile(residuals, self.REFERENCE_PERCENTILE))
        self._shape = windows.shape[1:]

    def scores(self, windows: np.ndarray) -> np.ndarray:
        windows = as_windows(windows)
        check_feature_shape(self._shape, windows)
        residuals = window_residuals(windows)
        if self.tau_ref <= 0.0:
            # Degenerate training block (constant signal): any deviation flags.
            return (residuals > 0.0).astype(np.float64)
        return np.minimum(1.0, residuals / self.tau_ref)
