"""Precision/recall machinery, average precision, and the imbalance-sensitivity AUC.

Conventions declared once and used everywhere:

* PR curves have one point per distinct score value, processed in descending
  score order; tied samples enter the confusion counts together.
* Average precision is the recall-weighted sum of precisions,
  ``AP = sum_i (R_i - R_{i-1}) * P_i`` with ``R_0 = 0``.
* Medians use the midpoint average for even counts; sigma is the population
  (divide-by-n) standard deviation.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Sequence

import numpy as np

from .core import ScoredFold

__all__ = [
    "UndefinedMetricError",
    "PRPoint",
    "PRCurve",
    "pr_curve",
    "average_precision",
    "average_precision_score",
    "sensitivity_auc",
    "median",
    "sigma",
    "AggregateRow",
    "aggregate",
]


class UndefinedMetricError(ValueError):
    """Raised when a metric is undefined for the given labels (single class)."""


@dataclass(frozen=True)
class PRPoint:
    threshold: float
    precision: float
    recall: float


@dataclass(frozen=True)
class PRCurve:
    """Precision/recall points at strictly decreasing thresholds."""

    points: tuple[PRPoint, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise ValueError("a PR curve needs at least one point")
        previous: PRPoint | None = None
        for point in self.points:
            if not (0.0 <= point.precision <= 1.0 and 0.0 <= point.recall <= 1.0):
                raise ValueError(f"precision/recall outside [0, 1] at {point}")
            if previous is not None:
                if point.threshold >= previous.threshold:
                    raise ValueError("thresholds must be strictly decreasing")
                if point.recall < previous.recall:
                    raise ValueError("recall must be nondecreasing")
            previous = point

    @property
    def precisions(self) -> np.ndarray:
        return np.array([p.precision for p in self.points])

    @property
    def recalls(self) -> np.ndarray:
        return np.array([p.recall for p in self.points])


def pr_curve(scores: Sequence[float], labels: Sequence[int]) -> PRCurve:
    """Precision/recall at every distinct score threshold, descending.

    At threshold t every sample with score >= t is predicted positive, so all
    samples sharing a score enter the confusion matrix together.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError(
            f"scores and labels must be equal-length 1-D, got {scores.shape} "
            f"and {labels.shape}"
        )
    positives = int(labels.sum())
    if positives == 0 or positives == labels.shape[0]:
        raise UndefinedMetricError(
            "precision-recall is undefined when only one class is present"
        )

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order].astype(np.int64)

    # Last position of each tie group of equal scores.
    group_end = np.ones(scores.shape[0], dtype=bool)
    group_end[:-1] = sorted_scores[:-1] != sorted_scores[1:]

    cumulative_tp = np.cumsum(sorted_labels)
    predicted_positive = np.arange(1, scores.shape[0] + 1)

    tp = cumulative_tp[group_end]
    pp = predicted_positive[group_end]
    thresholds = sorted_scores[group_end]

    precision = tp / pp
    recall = tp / positives
    points = tuple(
        PRPoint(float(t), float(p), float(r))
        for t, p, r in zip(thresholds, precision, recall)
    )
    return PRCurve(points)


def average_precision(curve: PRCurve) -> float:
    """Recall-weighted mean of precisions over the curve."""
    total = 0.0
    previous_recall = 0.0
    for point in curve.points:
        total += (point.recall - previous_recall) * point.precision
        previous_recall = point.recall
    return float(total)


def average_precision_score(scores: Sequence[float], labels: Sequence[int]) -> float:
    """AP computed directly from scores and labels."""
    return average_precision(pr_curve(scores, labels))


def sensitivity_auc(folds: Iterable[ScoredFold]) -> float | None:
    """Trapezoidal integral of fold AUC-PR over fold positive ratio.

    Pairs are sorted ascending by positive ratio (stable, so duplicate ratios
    keep their input order and contribute zero-width trapezoids). Returns
    ``None`` with fewer than two valid folds, mirroring the absent record
    field.
    """
    pairs = [(sf.positive_ratio, sf.auc_pr) for sf in folds if sf.valid]
    if len(pairs) < 2:
        return None
    pairs.sort(key=lambda pair: pair[0])
    total = 0.0
    for (r_lo, s_lo), (r_hi, s_hi) in zip(pairs, pairs[1:]):
        total += 0.5 * (s_lo + s_hi) * (r_hi - r_lo)
    return float(total)


def median(values: Sequence[float]) -> float:
    """Midpoint-average median (even counts average the two middle values)."""
    return float(statistics.median(values))


def sigma(values: Sequence[float]) -> float:
    """Population standard deviation (divide by n)."""
    return float(statistics.pstdev(values))


@dataclass(frozen=True)
class AggregateRow:
    key: tuple[Any, ...]
    median: float
    sigma: float
    n: int


def aggregate(pairs: Iterable[tuple[Hashable, float]]) -> list[AggregateRow]:
    """Median and population sigma per group of (key, value) pairs.

    Keys may be scalars or tuples; rows come back sorted by key. Empty input
    produces no rows (absent groups stay absent).
    """
    groups: dict[tuple[Any, ...], list[float]] = {}
    for key, value in pairs:
        tuple_key = key if isinstance(key, tuple) else (key,)
        groups.setdefault(tuple_key, []).append(float(value))
    rows = [
        AggregateRow(key=key, median=median(vals), sigma=sigma(vals), n=len(vals))
        for key, vals in groups.items()
    ]
    rows.sort(key=lambda row: tuple(str(part) for part in row.key))
    return rows
