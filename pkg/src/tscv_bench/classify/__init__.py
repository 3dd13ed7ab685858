"""Pluggable binary scorers keyed by classifier id.

Built-in ids: majority, residual, rf, logistic, rocket. Tests may register
extra scorers (e.g. oracles) through :func:`register_classifier`.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .base import ClassifierModel, Scorer, TrainingError, as_windows
from .baselines import MajorityPrior, ResidualThreshold, residual_score, window_residuals
from .features import WINDOW_LOOKBACK, build_windows, flatten_windows
from .forest import DecisionTree, RandomForest, RandomForestScorer
from .logistic import LogisticHead, LogisticScorer, loss_and_gradient, sigmoid
from .rocket import (
    DEFAULT_NUM_KERNELS,
    RocketKernel,
    RocketScorer,
    generate_kernels,
    ppv_max,
    rocket_generate,
    rocket_transform,
)

__all__ = [
    "ClassifierModel",
    "Scorer",
    "TrainingError",
    "CLASSIFIER_IDS",
    "register_classifier",
    "make_scorer",
    "needs_both_classes",
    "fit",
    "predict_scores",
    "residual_score",
    "window_residuals",
    "WINDOW_LOOKBACK",
    "build_windows",
    "flatten_windows",
    "DecisionTree",
    "RandomForest",
    "RandomForestScorer",
    "LogisticHead",
    "LogisticScorer",
    "loss_and_gradient",
    "sigmoid",
    "MajorityPrior",
    "ResidualThreshold",
    "RocketKernel",
    "RocketScorer",
    "generate_kernels",
    "rocket_generate",
    "rocket_transform",
    "ppv_max",
    "DEFAULT_NUM_KERNELS",
]

MIN_TRAIN_SAMPLES = 10

# id -> (factory accepting keyword options, whether fit needs both classes)
_REGISTRY: dict[str, tuple[Callable[..., Scorer], bool]] = {
    "majority": (MajorityPrior, False),
    "residual": (ResidualThreshold, False),
    "rf": (RandomForestScorer, True),
    "logistic": (LogisticScorer, True),
    "rocket": (RocketScorer, True),
}

CLASSIFIER_IDS = tuple(_REGISTRY)


def register_classifier(
    classifier_id: str,
    factory: Callable[..., Scorer],
    needs_both_classes: bool = False,
) -> None:
    """Add or replace a scorer factory (used by the test harness)."""
    _REGISTRY[classifier_id] = (factory, needs_both_classes)


def make_scorer(classifier_id: str, **options) -> Scorer:
    try:
        factory, _ = _REGISTRY[classifier_id]
    except KeyError:
        raise ValueError(
            f"unknown classifier {classifier_id!r}; known ids: {sorted(_REGISTRY)}"
        ) from None
    return factory(**options)


def needs_both_classes(classifier_id: str) -> bool:
    return _REGISTRY[classifier_id][1]


def _scorer_options(classifier_id: str, rocket_kernels: int | None) -> dict:
    if classifier_id == "rocket" and rocket_kernels is not None:
        return {"num_kernels": rocket_kernels}
    return {}


def fit(
    classifier_id: str,
    train_features: np.ndarray,
    train_labels: np.ndarray,
    seed: int,
    rocket_kernels: int | None = None,
) -> ClassifierModel:
    """Fit the identified classifier; deterministic for a fixed seed.

    Rejects undersized training sets, and single-class training sets for the
    discriminative classifiers (the label-free baselines tolerate them).
    """
    windows = as_windows(train_features)
    labels = np.asarray(train_labels)
    n_train = windows.shape[0]
    if labels.shape[0] != n_train:
        raise TrainingError(
            f"{labels.shape[0]} labels for {n_train} training samples"
        )
    if n_train < MIN_TRAIN_SAMPLES:
        raise TrainingError(
            f"training block of {n_train} samples is below the minimum of "
            f"{MIN_TRAIN_SAMPLES}"
        )
    positives = int(labels.sum())
    if needs_both_classes(classifier_id) and positives in (0, n_train):
        raise TrainingError(
            f"classifier {classifier_id!r} needs both classes in the training "
            f"block, got a single-class block"
        )
    scorer = make_scorer(classifier_id, **_scorer_options(classifier_id, rocket_kernels))
    scorer.fit(windows, labels, np.random.default_rng(seed))
    return ClassifierModel(classifier_id=classifier_id, fitted_state=scorer, seed=seed)


def predict_scores(model: ClassifierModel, test_features: np.ndarray) -> np.ndarray:
    """One score in [0, 1] per test sample from the fitted state."""
    windows = as_windows(test_features)
    return np.asarray(model.fitted_state.scores(windows), dtype=np.float64)
