"""Shared fixtures and test-only scorers.

The oracle/anti-oracle scorers work on datasets whose first channel carries
the label track, so they stay inside the production fit/scores interface
(features in, scores out) while achieving perfect / worst-case ranking.
"""

from __future__ import annotations

import numpy as np
import pytest

from tscv_bench.classify import register_classifier
from tscv_bench.core import LabelTrack, LabeledDataset, MultivariateSeries, TimeGrid
from tscv_bench.data import SynthConfig, synthesize


class LabelChannelOracle:
    """Reads the label planted in channel 0 at the window's last position."""

    def fit(self, windows, labels, rng):
        pass

    def scores(self, windows):
        return np.clip(windows[:, 0, -1], 0.0, 1.0)


class AntiLabelChannelOracle:
    def fit(self, windows, labels, rng):
        pass

    def scores(self, windows):
        return 1.0 - np.clip(windows[:, 0, -1], 0.0, 1.0)


class RandomScorer:
    """Label-independent uniform scores, reproducible from the fit seed."""

    def fit(self, windows, labels, rng):
        self._key = int(rng.integers(0, 2**63))

    def scores(self, windows):
        return np.random.default_rng(self._key).uniform(size=windows.shape[0])


register_classifier("oracle", LabelChannelOracle)
register_classifier("anti_oracle", AntiLabelChannelOracle)
register_classifier("random", RandomScorer)


def with_label_channel(dataset: LabeledDataset) -> LabeledDataset:
    """Copy of the dataset whose channel 0 is replaced by the label track."""
    values = dataset.series.values.copy()
    values[0] = dataset.labels.labels.astype(np.float64)
    series = MultivariateSeries(
        grid=dataset.series.grid,
        channels=dataset.series.channels,
        values=values,
    )
    return LabeledDataset(
        name=dataset.name + "+labels", series=series, labels=dataset.labels
    )


def make_dataset(labels, values=None, rate_hz=10.0, name="toy") -> LabeledDataset:
    """Small dataset from explicit labels and optional (m, T) values."""
    labels = np.asarray(labels, dtype=np.int8)
    if values is None:
        rng = np.random.default_rng(0)
        values = rng.normal(size=(2, labels.shape[0]))
    values = np.asarray(values, dtype=np.float64)
    grid = TimeGrid(rate_hz=rate_hz, length=labels.shape[0])
    series = MultivariateSeries(
        grid=grid,
        channels=tuple(f"ch{idx}" for idx in range(values.shape[0])),
        values=values,
    )
    return LabeledDataset(name=name, series=series, labels=LabelTrack(labels))


# Acceptance verdict lines, echoed in the terminal summary so they survive
# pytest's output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def synth_dataset() -> LabeledDataset:
    return synthesize(SynthConfig())


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
