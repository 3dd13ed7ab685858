"""Experiment driver: expands the grid, scores folds, and summarizes records.

Work units are (dataset, strategy, K, classifier) cells executed in a fixed
grid order, so output is identical for identical (grid, seed) regardless of
the worker count. Every fold's classifier gets its own RNG stream derived
from the global seed by a documented stable hash.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import classify, folds as folds_mod, metrics
from .classify import TrainingError, build_windows
from .core import (
    ConfigurationError,
    ExperimentRecord,
    Fold,
    FoldSkip,
    LabelTrack,
    LabeledDataset,
    ScoredFold,
    Strategy,
)
from .stats import mann_whitney_u

__all__ = [
    "ExperimentGrid",
    "job_seed",
    "evaluate_fold",
    "run_cell",
    "run_grid",
    "SummaryTable",
    "summarize",
    "emit_plotdata",
    "plotdata_csv",
]

logger = logging.getLogger(__name__)

DEFAULT_K_VALUES = (3, 4, 5, 6, 7, 8, 9)
DEFAULT_DELTA = 150


@dataclass(frozen=True, eq=False)
class ExperimentGrid:
    """The full experiment lattice plus execution parameters."""

    datasets: tuple[LabeledDataset, ...]
    strategies: tuple[Strategy, ...] = (Strategy.WALK_FORWARD, Strategy.SLIDING_WINDOW)
    k_values: tuple[int, ...] = DEFAULT_K_VALUES
    delta: int = DEFAULT_DELTA
    classifiers: tuple[str, ...] = classify.CLASSIFIER_IDS
    seed: int = 0
    rocket_kernels: int = classify.DEFAULT_NUM_KERNELS
    parallelism: int = 1

    def __post_init__(self) -> None:
        for dimension, name in (
            (self.datasets, "datasets"),
            (self.strategies, "strategies"),
            (self.k_values, "k_values"),
            (self.classifiers, "classifiers"),
        ):
            if not dimension:
                raise ConfigurationError(f"grid dimension {name!r} is empty")
        if self.delta < 1:
            raise ConfigurationError(f"delta must be >= 1, got {self.delta}")
        if self.parallelism < 1:
            raise ConfigurationError("parallelism must be >= 1")

    def cells(self) -> list[tuple[LabeledDataset, Strategy, int, str]]:
        return [
            (dataset, strategy, k_folds, classifier_id)
            for dataset in self.datasets
            for strategy in self.strategies
            for k_folds in self.k_values
            for classifier_id in self.classifiers
        ]


def job_seed(
    global_seed: int,
    dataset_name: str,
    strategy: Strategy,
    k_folds: int,
    fold_k: int,
    classifier_id: str,
) -> int:
    """Stable per-fold seed: first 8 bytes of the SHA-256 of the job key.

    The key is ``"{seed}|{dataset}|{strategy}|{K}|{k}|{classifier}"``, so any
    fold of any run can be replayed in isolation.
    """
    key = f"{global_seed}|{dataset_name}|{strategy.value}|{k_folds}|{fold_k}|{classifier_id}"
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def evaluate_fold(labels: LabelTrack, fold: Fold, scores: np.ndarray) -> ScoredFold:
    """Assemble a ScoredFold: positive ratio, validity, and AP when defined."""
    positive_ratio, valid = folds_mod.fold_validity(labels, fold)
    auc_pr = None
    if valid:
        auc_pr = metrics.average_precision_score(
            scores, labels.labels[fold.test_slice()]
        )
    return ScoredFold(
        fold=fold,
        scores=np.asarray(scores, dtype=np.float64),
        positive_ratio=positive_ratio,
        valid=valid,
        auc_pr=auc_pr,
    )


def _assemble_record(
    dataset: LabeledDataset,
    classifier_id: str,
    strategy: Strategy,
    k_folds: int,
    delta: int,
    seed: int,
    scored: Sequence[ScoredFold],
    skips: Sequence[FoldSkip],
    skip_reason: str | None = None,
) -> ExperimentRecord:
    valid_aps = [sf.auc_pr for sf in scored if sf.valid]
    return ExperimentRecord(
        dataset_name=dataset.name,
        classifier_id=classifier_id,
        strategy=strategy,
        k_folds=k_folds,
        delta=delta,
        seed=seed,
        scored_folds=tuple(scored),
        median_auc_pr=metrics.median(valid_aps) if valid_aps else None,
        sensitivity_auc=metrics.sensitivity_auc(scored),
        skips=tuple(skips),
        skip_reason=skip_reason,
    )


def run_cell(
    dataset: LabeledDataset,
    strategy: Strategy,
    k_folds: int,
    classifier_id: str,
    delta: int = DEFAULT_DELTA,
    seed: int = 0,
    rocket_kernels: int | None = None,
    windows: np.ndarray | None = None,
) -> ExperimentRecord:
    """Run one grid cell: plan folds, fit per fold, score, evaluate.

    A fold-plan failure produces a record with a skip reason instead of
    aborting; folds whose training block cannot be fitted are skipped
    individually with their reason.
    """
    try:
        plan = folds_mod.plan(strategy, dataset.length, k_folds, delta)
    except ConfigurationError as error:
        logger.warning(
            "skipping cell (%s, %s, K=%d, %s): %s",
            dataset.name, strategy.value, k_folds, classifier_id, error,
        )
        return _assemble_record(
            dataset, classifier_id, strategy, k_folds, delta, seed,
            scored=(), skips=(), skip_reason=str(error),
        )

    if windows is None:
        windows = build_windows(dataset.series)
    label_values = dataset.labels.labels

    scored: list[ScoredFold] = []
    skips: list[FoldSkip] = []
    for fold in plan:
        fold_seed = job_seed(
            seed, dataset.name, strategy, k_folds, fold.k, classifier_id
        )
        try:
            model = classify.fit(
                classifier_id,
                windows[fold.train_slice()],
                label_values[fold.train_slice()],
                seed=fold_seed,
                rocket_kernels=rocket_kernels,
            )
        except TrainingError as error:
            skips.append(FoldSkip(k=fold.k, reason=str(error)))
            continue
        scores = classify.predict_scores(model, windows[fold.test_slice()])
        scored.append(evaluate_fold(dataset.labels, fold, scores))

    skip_reason = None
    if not scored:
        skip_reason = "no folds could be scored (see skips)"
    elif not any(sf.valid for sf in scored):
        skip_reason = "no valid folds (every scored test block is single-class)"
    return _assemble_record(
        dataset, classifier_id, strategy, k_folds, delta, seed,
        scored=scored, skips=skips, skip_reason=skip_reason,
    )


def _run_cell_task(args) -> ExperimentRecord:
    dataset, strategy, k_folds, classifier_id, delta, seed, rocket_kernels = args
    return run_cell(
        dataset, strategy, k_folds, classifier_id,
        delta=delta, seed=seed, rocket_kernels=rocket_kernels,
    )


def run_grid(grid: ExperimentGrid) -> list[ExperimentRecord]:
    """Run every grid cell in deterministic grid order."""
    cells = grid.cells()
    if grid.parallelism > 1:
        tasks = [
            (dataset, strategy, k_folds, classifier_id,
             grid.delta, grid.seed, grid.rocket_kernels)
            for dataset, strategy, k_folds, classifier_id in cells
        ]
        with ProcessPoolExecutor(max_workers=grid.parallelism) as pool:
            return list(pool.map(_run_cell_task, tasks))

    records = []
    window_cache: dict[str, np.ndarray] = {}
    for dataset, strategy, k_folds, classifier_id in cells:
        if dataset.name not in window_cache:
            window_cache[dataset.name] = build_windows(dataset.series)
        records.append(
            run_cell(
                dataset, strategy, k_folds, classifier_id,
                delta=grid.delta, seed=grid.seed,
                rocket_kernels=grid.rocket_kernels,
                windows=window_cache[dataset.name],
            )
        )
    return records


@dataclass
class SummaryTable:
    name: str
    columns: list[str]
    rows: list[list]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow(["" if cell is None else cell for cell in row])
        return buffer.getvalue()


def _fold_scores_by(
    records: Iterable[ExperimentRecord], key_fn
) -> dict[tuple, dict[Strategy, list[float]]]:
    table: dict[tuple, dict[Strategy, list[float]]] = {}
    for record in records:
        for sf in record.valid_folds:
            bucket = table.setdefault(key_fn(record), {})
            bucket.setdefault(record.strategy, []).append(sf.auc_pr)
    return table


def _sensitivity_by(
    records: Iterable[ExperimentRecord], key_fn
) -> dict[tuple, dict[Strategy, list[float]]]:
    table: dict[tuple, dict[Strategy, list[float]]] = {}
    for record in records:
        if record.sensitivity_auc is None:
            continue
        bucket = table.setdefault(key_fn(record), {})
        bucket.setdefault(record.strategy, []).append(record.sensitivity_auc)
    return table


def _wf_sw(bucket: dict[Strategy, list[float]]) -> tuple[list[float], list[float]]:
    return (
        bucket.get(Strategy.WALK_FORWARD, []),
        bucket.get(Strategy.SLIDING_WINDOW, []),
    )


def _median_table(
    name: str,
    lead_columns: list[str],
    buckets: dict[tuple, dict[Strategy, list[float]]],
    key_order: list[tuple],
) -> SummaryTable:
    rows = []
    for key in key_order:
        wf, sw = _wf_sw(buckets.get(key, {}))
        p_value = None
        if wf and sw:
            p_value = mann_whitney_u(wf, sw, alternative="less").p_value
        rows.append(
            [
                *key,
                metrics.median(wf) if wf else None,
                metrics.median(sw) if sw else None,
                p_value,
            ]
        )
    return SummaryTable(name, [*lead_columns, "m_wf", "m_sw", "p_value"], rows)


def _spread_table(
    name: str,
    lead_columns: list[str],
    buckets: dict[tuple, dict[Strategy, list[float]]],
    key_order: list[tuple],
) -> SummaryTable:
    rows = []
    for key in key_order:
        wf, sw = _wf_sw(buckets.get(key, {}))
        rows.append(
            [
                *key,
                metrics.median(wf) if wf else None,
                metrics.sigma(wf) if wf else None,
                metrics.median(sw) if sw else None,
                metrics.sigma(sw) if sw else None,
            ]
        )
    return SummaryTable(
        name, [*lead_columns, "m_wf", "sigma_wf", "m_sw", "sigma_sw"], rows
    )


def summarize(
    records: Sequence[ExperimentRecord], per_dataset: bool = False
) -> dict[str, SummaryTable]:
    """Summary tables over a record stream.

    Produces per-classifier and per-K median AUC-PR tables (with one-sided
    Mann-Whitney p-values for the walk-forward-below-sliding-window
    alternative) and the matching sensitivity-AUC median/sigma tables. With
    ``per_dataset`` the grouping keys gain a leading dataset column; the
    default pools every dataset.
    """
    if not records:
        raise ValueError("summarize needs at least one record")

    def with_dataset(key_fn):
        if per_dataset:
            return lambda record: (record.dataset_name, *key_fn(record))
        return key_fn

    classifier_key = with_dataset(lambda record: (record.classifier_id,))
    k_key = with_dataset(lambda record: (record.k_folds,))

    classifier_order: list[tuple] = []
    k_order: list[tuple] = []
    for record in records:
        for key, order in ((classifier_key(record), classifier_order),
                           (k_key(record), k_order)):
            if key not in order:
                order.append(key)
    k_order.sort()

    lead_classifier = ["dataset", "classifier"] if per_dataset else ["classifier"]
    lead_k = ["dataset", "K"] if per_dataset else ["K"]

    return {
        "classifier_auc_pr": _median_table(
            "classifier_auc_pr", lead_classifier,
            _fold_scores_by(records, classifier_key), classifier_order,
        ),
        "k_fold_auc_pr": _median_table(
            "k_fold_auc_pr", lead_k, _fold_scores_by(records, k_key), k_order,
        ),
        "classifier_sensitivity": _spread_table(
            "classifier_sensitivity", lead_classifier,
            _sensitivity_by(records, classifier_key), classifier_order,
        ),
        "k_fold_sensitivity": _spread_table(
            "k_fold_sensitivity", lead_k, _sensitivity_by(records, k_key), k_order,
        ),
    }


def emit_plotdata(records: Sequence[ExperimentRecord]) -> list[tuple]:
    """One row per valid fold: (strategy, classifier, K, fold, auc_pr, positive_ratio)."""
    if not records:
        raise ValueError("emit_plotdata needs at least one record")
    rows = [
        (
            record.strategy.value,
            record.classifier_id,
            record.k_folds,
            sf.fold.k,
            sf.auc_pr,
            sf.positive_ratio,
        )
        for record in records
        for sf in record.valid_folds
    ]
    rows.sort(key=lambda row: (row[0], row[1], row[2], row[3]))
    return rows


def plotdata_csv(records: Sequence[ExperimentRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["strategy", "classifier", "K", "fold", "auc_pr", "positive_ratio"]
    )
    writer.writerows(emit_plotdata(records))
    return buffer.getvalue()
