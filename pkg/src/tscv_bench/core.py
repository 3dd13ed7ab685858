"""Shared domain types: time grids, labeled series, folds, and result records.

All types are immutable after construction and safe to share across
concurrent workers. Index conventions on the external contract (files, CLI
output) are 1-based inclusive; helper methods expose the equivalent 0-based
Python slices for internal array work.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Iterator

import numpy as np

__all__ = [
    "ConfigurationError",
    "Strategy",
    "TimeGrid",
    "MultivariateSeries",
    "LabelTrack",
    "LabeledDataset",
    "Fold",
    "FoldPlan",
    "ScoredFold",
    "FoldSkip",
    "ExperimentRecord",
    "subsequence_view",
    "read_records_jsonl",
    "write_records_jsonl",
]


class ConfigurationError(ValueError):
    """An experiment or dataset configuration that cannot be satisfied."""


class Strategy(str, Enum):
    """Temporal cross-validation strategy."""

    WALK_FORWARD = "WalkForward"
    SLIDING_WINDOW = "SlidingWindow"

    @property
    def token(self) -> str:
        """Short CLI token: 'wf' or 'sw'."""
        return "wf" if self is Strategy.WALK_FORWARD else "sw"

    @classmethod
    def from_token(cls, token: str) -> "Strategy":
        mapping = {
            "wf": cls.WALK_FORWARD,
            "sw": cls.SLIDING_WINDOW,
            cls.WALK_FORWARD.value.lower(): cls.WALK_FORWARD,
            cls.SLIDING_WINDOW.value.lower(): cls.SLIDING_WINDOW,
        }
        try:
            return mapping[token.strip().lower()]
        except KeyError:
            raise ConfigurationError(
                f"unknown strategy {token!r}; expected one of wf, sw"
            ) from None


def _freeze(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling grid; timestamp i is ``origin_s + i / rate_hz``."""

    rate_hz: float
    length: int
    origin_s: float = 0.0

    def __post_init__(self) -> None:
        if not self.rate_hz > 0:
            raise ConfigurationError(f"rate_hz must be positive, got {self.rate_hz}")
        if self.length < 1:
            raise ConfigurationError(f"grid length must be >= 1, got {self.length}")

    def timestamps(self) -> np.ndarray:
        """Timestamps in seconds for every grid point."""
        return self.origin_s + np.arange(self.length) / self.rate_hz


@dataclass(frozen=True, eq=False)
class MultivariateSeries:
    """m-channel real-valued series on a shared uniform grid.

    ``values`` has shape (m, length) with channel order matching
    ``channels``. The array is marked read-only on construction.
    """

    grid: TimeGrid
    channels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"values must be 2-D (m, length), got shape {values.shape}")
        m, length = values.shape
        if m < 1:
            raise ValueError("a series needs at least one channel")
        if len(self.channels) != m:
            raise ValueError(
                f"{len(self.channels)} channel names for {m} value rows"
            )
        if length != self.grid.length:
            raise ValueError(
                f"values have {length} samples but grid length is {self.grid.length}"
            )
        if np.isnan(values).any():
            raise ValueError("series contains missing values after ingestion")
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "values", _freeze(values))

    @property
    def num_channels(self) -> int:
        return len(self.channels)

    @property
    def length(self) -> int:
        return self.grid.length


@dataclass(frozen=True, eq=False)
class LabelTrack:
    """Per-timestamp binary labels; 1 marks the fault/anomalous state."""

    labels: np.ndarray

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise ValueError("labels must be 1-D")
        values = np.unique(labels)
        if not np.isin(values, (0, 1)).all():
            raise ValueError(f"labels must be 0/1, found values {values}")
        object.__setattr__(self, "labels", _freeze(labels.astype(np.int8)))

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def positive_count(self) -> int:
        return int(self.labels.sum())


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """A named series together with its label track."""

    name: str
    series: MultivariateSeries
    labels: LabelTrack

    def __post_init__(self) -> None:
        if len(self.labels) != self.series.length:
            raise ValueError(
                f"label track length {len(self.labels)} != series length "
                f"{self.series.length}"
            )

    @property
    def length(self) -> int:
        return self.series.length


@dataclass(frozen=True, order=True)
class Fold:
    """One train/test split; all indices 1-based inclusive."""

    k: int
    train_start: int
    train_end: int
    test_start: int
    test_end: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"fold index must be >= 1, got {self.k}")
        if not (1 <= self.train_start <= self.train_end):
            raise ValueError(f"bad train range [{self.train_start}, {self.train_end}]")
        if not (self.train_end < self.test_start <= self.test_end):
            raise ValueError(
                f"test block [{self.test_start}, {self.test_end}] must follow "
                f"train block ending at {self.train_end}"
            )

    @property
    def train_length(self) -> int:
        return self.train_end - self.train_start + 1

    @property
    def test_length(self) -> int:
        return self.test_end - self.test_start + 1

    def train_slice(self) -> slice:
        """0-based half-open slice over the training block."""
        return slice(self.train_start - 1, self.train_end)

    def test_slice(self) -> slice:
        """0-based half-open slice over the test block."""
        return slice(self.test_start - 1, self.test_end)

    def to_json(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "train": [self.train_start, self.train_end],
            "test": [self.test_start, self.test_end],
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "Fold":
        return cls(
            k=int(obj["k"]),
            train_start=int(obj["train"][0]),
            train_end=int(obj["train"][1]),
            test_start=int(obj["test"][0]),
            test_end=int(obj["test"][1]),
        )


@dataclass(frozen=True)
class FoldPlan:
    """A strategy instantiated into K concrete folds.

    Construction re-checks the closed-form index ranges, so any plan that
    exists is consistent with its (strategy, omega, delta) parameters:
    test block k is exactly [omega+(k-1)*delta+1, omega+k*delta], walk-forward
    training blocks are the growing prefix [1, omega+(k-1)*delta], and
    sliding-window training blocks are the fixed-width window
    [1+(k-1)*delta, omega+(k-1)*delta].
    """

    strategy: Strategy
    k_folds: int
    omega: int
    delta: int
    folds: tuple[Fold, ...]

    def __post_init__(self) -> None:
        if self.k_folds < 2:
            raise ConfigurationError(f"K must be >= 2, got {self.k_folds}")
        if self.omega < 1 or self.delta < 1:
            raise ConfigurationError(
                f"omega and delta must be positive, got omega={self.omega}, "
                f"delta={self.delta}"
            )
        if len(self.folds) != self.k_folds:
            raise ValueError(f"{len(self.folds)} folds for K={self.k_folds}")
        object.__setattr__(self, "folds", tuple(self.folds))
        for position, fold in enumerate(self.folds, start=1):
            if fold.k != position:
                raise ValueError(f"fold {position} carries index k={fold.k}")
            expected_test_start = self.omega + (fold.k - 1) * self.delta + 1
            expected_test_end = self.omega + fold.k * self.delta
            if (fold.test_start, fold.test_end) != (expected_test_start, expected_test_end):
                raise ValueError(
                    f"fold {fold.k} test block [{fold.test_start}, {fold.test_end}] "
                    f"!= [{expected_test_start}, {expected_test_end}]"
                )
            if self.strategy is Strategy.WALK_FORWARD:
                expected_train = (1, self.omega + (fold.k - 1) * self.delta)
            else:
                expected_train = (
                    1 + (fold.k - 1) * self.delta,
                    self.omega + (fold.k - 1) * self.delta,
                )
            if (fold.train_start, fold.train_end) != expected_train:
                raise ValueError(
                    f"fold {fold.k} train block [{fold.train_start}, {fold.train_end}] "
                    f"!= {list(expected_train)}"
                )

    def __iter__(self) -> Iterator[Fold]:
        return iter(self.folds)

    @property
    def span(self) -> int:
        """Last series index covered by the plan (omega + K * delta)."""
        return self.omega + self.k_folds * self.delta


@dataclass(frozen=True, eq=False)
class ScoredFold:
    """Classifier scores over one fold's test block plus its validity.

    A fold is valid exactly when its test block contains both classes;
    ``auc_pr`` is present only for valid folds.
    """

    fold: Fold
    scores: np.ndarray
    positive_ratio: float
    valid: bool
    auc_pr: float | None = None

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 1:
            raise ValueError("scores must be 1-D")
        if scores.shape[0] != self.fold.test_length:
            raise ValueError(
                f"{scores.shape[0]} scores for a test block of length "
                f"{self.fold.test_length}"
            )
        if not 0.0 <= self.positive_ratio <= 1.0:
            raise ValueError(f"positive_ratio {self.positive_ratio} outside [0, 1]")
        if self.valid != (0.0 < self.positive_ratio < 1.0):
            raise ValueError(
                f"valid={self.valid} inconsistent with positive_ratio="
                f"{self.positive_ratio}"
            )
        if self.valid and self.auc_pr is None:
            raise ValueError("valid fold must carry auc_pr")
        if not self.valid and self.auc_pr is not None:
            raise ValueError("invalid fold must not carry auc_pr")
        object.__setattr__(self, "scores", _freeze(scores))

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "fold": self.fold.to_json(),
            "scores": [float(s) for s in self.scores],
            "positive_ratio": float(self.positive_ratio),
            "valid": self.valid,
        }
        if self.auc_pr is not None:
            obj["auc_pr"] = float(self.auc_pr)
        return obj

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "ScoredFold":
        return cls(
            fold=Fold.from_json(obj["fold"]),
            scores=np.asarray(obj["scores"], dtype=np.float64),
            positive_ratio=float(obj["positive_ratio"]),
            valid=bool(obj["valid"]),
            auc_pr=float(obj["auc_pr"]) if "auc_pr" in obj else None,
        )


@dataclass(frozen=True)
class FoldSkip:
    """A fold that could not be scored, with the reason it was skipped."""

    k: int
    reason: str

    def to_json(self) -> dict[str, Any]:
        return {"k": self.k, "reason": self.reason}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "FoldSkip":
        return cls(k=int(obj["k"]), reason=str(obj["reason"]))


@dataclass(frozen=True, eq=False)
class ExperimentRecord:
    """One (dataset x strategy x K x classifier) run with per-fold results.

    ``median_auc_pr`` and ``sensitivity_auc`` are aggregates over valid folds
    only; either is ``None`` when there is not enough valid data (no valid
    folds, or fewer than two for the sensitivity integral). ``skips`` lists
    folds that could not be scored at all, and ``skip_reason`` is set when the
    whole cell was abandoned (e.g. no fold plan exists for the configuration).
    """

    dataset_name: str
    classifier_id: str
    strategy: Strategy
    k_folds: int
    delta: int
    seed: int
    scored_folds: tuple[ScoredFold, ...]
    median_auc_pr: float | None = None
    sensitivity_auc: float | None = None
    skips: tuple[FoldSkip, ...] = ()
    skip_reason: str | None = None

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError("seed must be unsigned")
        object.__setattr__(self, "scored_folds", tuple(self.scored_folds))
        object.__setattr__(self, "skips", tuple(self.skips))

    @property
    def valid_folds(self) -> tuple[ScoredFold, ...]:
        return tuple(sf for sf in self.scored_folds if sf.valid)

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "dataset_name": self.dataset_name,
            "classifier_id": self.classifier_id,
            "strategy": self.strategy.value,
            "K": self.k_folds,
            "delta": self.delta,
            "seed": self.seed,
            "scored_folds": [sf.to_json() for sf in self.scored_folds],
        }
        if self.median_auc_pr is not None:
            obj["median_auc_pr"] = float(self.median_auc_pr)
        if self.sensitivity_auc is not None:
            obj["sensitivity_auc"] = float(self.sensitivity_auc)
        if self.skips:
            obj["skips"] = [s.to_json() for s in self.skips]
        if self.skip_reason is not None:
            obj["skip_reason"] = self.skip_reason
        return obj

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "ExperimentRecord":
        return cls(
            dataset_name=str(obj["dataset_name"]),
            classifier_id=str(obj["classifier_id"]),
            strategy=Strategy(obj["strategy"]),
            k_folds=int(obj["K"]),
            delta=int(obj["delta"]),
            seed=int(obj["seed"]),
            scored_folds=tuple(
                ScoredFold.from_json(sf) for sf in obj.get("scored_folds", ())
            ),
            median_auc_pr=(
                float(obj["median_auc_pr"]) if "median_auc_pr" in obj else None
            ),
            sensitivity_auc=(
                float(obj["sensitivity_auc"]) if "sensitivity_auc" in obj else None
            ),
            skips=tuple(FoldSkip.from_json(s) for s in obj.get("skips", ())),
            skip_reason=obj.get("skip_reason"),
        )


def subsequence_view(series: MultivariateSeries, p: int, n: int) -> np.ndarray:
    """Columns p..p+n-1 (1-based inclusive) of the series values, as a view.

    Raises IndexError naming the offending index when the requested window
    does not fit inside the series.
    """
    if n < 1:
        raise IndexError(f"subsequence length n={n} must be >= 1")
    if p < 1:
        raise IndexError(f"subsequence start p={p} must be >= 1")
    if p + n - 1 > series.length:
        raise IndexError(
            f"subsequence end p+n-1={p + n - 1} exceeds series length {series.length}"
        )
    return series.values[:, p - 1 : p + n - 1]


def write_records_jsonl(records: Iterable[ExperimentRecord], path) -> None:
    """Write one JSON record per line; field order is fixed for reproducibility."""
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_json()) + "\n")


def read_records_jsonl(path) -> list[ExperimentRecord]:
    """Read a line-oriented JSON record stream written by write_records_jsonl."""
    records: list[ExperimentRecord] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(ExperimentRecord.from_json(json.loads(line)))
    return records
