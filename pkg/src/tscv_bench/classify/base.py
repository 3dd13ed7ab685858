"""Scorer interface shared by all classifiers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Protocol, runtime_checkable

import numpy as np


class TrainingError(RuntimeError):
    """A training set the requested classifier cannot be fitted on."""


@runtime_checkable
class Scorer(Protocol):
    """Binary scorer over per-sample feature windows.

    ``fit`` consumes windows of shape (n_samples, n_channels, lookback) with
    0/1 labels; ``scores`` returns one score in [0, 1] per sample and must be
    deterministic given the fitted state.
    """

    def fit(self, windows: np.ndarray, labels: np.ndarray, rng: np.random.Generator) -> None: ...

    def scores(self, windows: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class ClassifierModel:
    """A fitted scorer with its identity and the seed that produced it."""

    classifier_id: str
    fitted_state: Any
    seed: int


def as_windows(features: np.ndarray) -> np.ndarray:
    """Accept (n, m, w) windows or a flat (n, d) matrix as (n, 1, d)."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 2:
        return features[:, np.newaxis, :]
    if features.ndim != 3:
        raise ValueError(f"features must be 2-D or 3-D, got shape {features.shape}")
    return features


def check_feature_shape(expected: tuple[int, int], windows: np.ndarray) -> None:
    if windows.shape[1:] != expected:
        raise ValueError(
            f"feature windows of shape {windows.shape[1:]} do not match the "
            f"fitted shape {expected}"
        )
