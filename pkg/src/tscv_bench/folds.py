"""Fold-plan construction for walk-forward and sliding-window validation.

Both strategies share the same test blocks for a given (series length, K,
delta): block k is [omega+(k-1)*delta+1, omega+k*delta]. Walk-forward grows
the training prefix fold by fold; sliding-window keeps a fixed-width training
window that advances by delta and expires the oldest observations.
"""

from __future__ import annotations

import logging

from .core import ConfigurationError, Fold, FoldPlan, LabelTrack, Strategy

__all__ = [
    "MIN_TRAIN_WINDOW",
    "derive_omega",
    "plan_walk_forward",
    "plan_sliding_window",
    "plan",
    "fold_validity",
]

logger = logging.getLogger(__name__)

# Smallest admissible training window, in samples. A shorter block cannot
# meaningfully fit any of the classifiers.
MIN_TRAIN_WINDOW = 20


def derive_omega(series_length: int, k_folds: int, delta: int) -> int:
    """Training window length omega = series_length - K * delta.

    This is the maximal window such that the K-th test block ends exactly at
    the last sample, so the plan consumes the whole series.
    """
    if k_folds < 2:
        raise ConfigurationError(f"K must be >= 2, got {k_folds}")
    if delta < 1:
        raise ConfigurationError(f"delta must be >= 1, got {delta}")
    omega = series_length - k_folds * delta
    if omega < MIN_TRAIN_WINDOW:
        required = k_folds * delta + MIN_TRAIN_WINDOW
        raise ConfigurationError(
            f"series of length {series_length} is too short for K={k_folds}, "
            f"delta={delta}: needs at least {required} samples "
            f"(train window would be {omega} < {MIN_TRAIN_WINDOW})"
        )
    return omega


def _resolve_omega(series_length: int, k_folds: int, delta: int, omega: int | None) -> int:
    if omega is None:
        return derive_omega(series_length, k_folds, delta)
    if k_folds < 2:
        raise ConfigurationError(f"K must be >= 2, got {k_folds}")
    if delta < 1:
        raise ConfigurationError(f"delta must be >= 1, got {delta}")
    if omega < MIN_TRAIN_WINDOW:
        raise ConfigurationError(
            f"explicit train window omega={omega} is below the minimum of "
            f"{MIN_TRAIN_WINDOW} samples"
        )
    span = omega + k_folds * delta
    if span > series_length:
        raise ConfigurationError(
            f"omega={omega}, K={k_folds}, delta={delta} needs {span} samples "
            f"but the series has only {series_length}"
        )
    if span < series_length:
        logger.warning(
            "discarding %d trailing samples beyond omega + K*delta = %d",
            series_length - span,
            span,
        )
    return omega


def plan_walk_forward(
    series_length: int, k_folds: int, delta: int, omega: int | None = None
) -> FoldPlan:
    """Expanding-train-window plan: fold k trains on [1, omega+(k-1)*delta]."""
    omega = _resolve_omega(series_length, k_folds, delta, omega)
    folds = tuple(
        Fold(
            k=k,
            train_start=1,
            train_end=omega + (k - 1) * delta,
            test_start=omega + (k - 1) * delta + 1,
            test_end=omega + k * delta,
        )
        for k in range(1, k_folds + 1)
    )
    return FoldPlan(Strategy.WALK_FORWARD, k_folds, omega, delta, folds)


def plan_sliding_window(
    series_length: int, k_folds: int, delta: int, omega: int | None = None
) -> FoldPlan:
    """Fixed-train-window plan: fold k trains on [1+(k-1)*delta, omega+(k-1)*delta]."""
    omega = _resolve_omega(series_length, k_folds, delta, omega)
    folds = tuple(
        Fold(
            k=k,
            train_start=1 + (k - 1) * delta,
            train_end=omega + (k - 1) * delta,
            test_start=omega + (k - 1) * delta + 1,
            test_end=omega + k * delta,
        )
        for k in range(1, k_folds + 1)
    )
    return FoldPlan(Strategy.SLIDING_WINDOW, k_folds, omega, delta, folds)


def plan(
    strategy: Strategy,
    series_length: int,
    k_folds: int,
    delta: int,
    omega: int | None = None,
) -> FoldPlan:
    """Dispatch to the planner for ``strategy``."""
    if strategy is Strategy.WALK_FORWARD:
        return plan_walk_forward(series_length, k_folds, delta, omega)
    return plan_sliding_window(series_length, k_folds, delta, omega)


def fold_validity(labels: LabelTrack, fold: Fold) -> tuple[float, bool]:
    """Positive share of the fold's test block and whether both classes occur.

    AUC-PR is undefined on a single-class test block, so such folds are
    excluded from aggregation downstream.
    """
    if fold.test_end > len(labels):
        raise IndexError(
            f"fold {fold.k} test end {fold.test_end} exceeds label track length "
            f"{len(labels)}"
        )
    block = labels.labels[fold.test_slice()]
    positive_ratio = float(block.sum()) / block.shape[0]
    valid = 0.0 < positive_ratio < 1.0
    return positive_ratio, valid
