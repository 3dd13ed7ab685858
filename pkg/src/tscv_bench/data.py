"""Dataset ingestion and synthesis.

CSV ingestion targets decoded CAN-signal exports: one time column (seconds),
one binary "Fault Status" column, and numeric signal channels. Irregular
inputs are resampled onto a uniform grid by last-observation-carried-forward;
fault states align to the grid by zero-order hold. Synthetic datasets provide
a desk-scale stand-in: AR(1) channels with intermittent mean-shift fault
zones.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import pandas as pd

from .core import (
    ConfigurationError,
    LabelTrack,
    LabeledDataset,
    MultivariateSeries,
    TimeGrid,
)

__all__ = [
    "IngestionError",
    "RawSignalLog",
    "SynthConfig",
    "resample_uniform",
    "minmax_normalize",
    "align_labels",
    "load_labeled_csv",
    "write_labeled_csv",
    "synthesize",
    "DEFAULT_TIME_COLUMN",
    "DEFAULT_LABEL_COLUMN",
]

logger = logging.getLogger(__name__)

DEFAULT_TIME_COLUMN = "time"
DEFAULT_LABEL_COLUMN = "Fault Status"

# Timestamps within this jitter (seconds) count as the same grid point.
TIME_JITTER_S = 1e-6


class IngestionError(ValueError):
    """Malformed or unusable input data."""


@dataclass(frozen=True, eq=False)
class RawSignalLog:
    """Irregular per-channel observations plus fault on/off events.

    ``samples`` maps channel name to (timestamps, values) arrays with
    nondecreasing timestamps; ``fault_events`` is a time-ordered sequence of
    (timestamp, state) with state in {0, 1}.
    """

    samples: Mapping[str, tuple[np.ndarray, np.ndarray]]
    fault_events: tuple[tuple[float, int], ...] = ()

    def __post_init__(self) -> None:
        if not self.samples:
            raise IngestionError("a signal log needs at least one channel")
        frozen: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        for name, (times, values) in self.samples.items():
            times = np.asarray(times, dtype=np.float64)
            values = np.asarray(values, dtype=np.float64)
            if times.shape != values.shape or times.ndim != 1 or times.size == 0:
                raise IngestionError(f"channel {name!r} has malformed observations")
            if np.any(np.diff(times) < 0):
                raise IngestionError(f"channel {name!r} timestamps are not ordered")
            frozen[name] = (times, values)
        object.__setattr__(self, "samples", frozen)
        events = tuple((float(t), int(s)) for t, s in self.fault_events)
        for (t0, _), (t1, _) in zip(events, events[1:]):
            if t1 < t0:
                raise IngestionError("fault events are not time-ordered")
        for _, state in events:
            if state not in (0, 1):
                raise IngestionError(f"fault state must be 0/1, got {state}")
        object.__setattr__(self, "fault_events", events)


def resample_uniform(log: RawSignalLog, rate_hz: float) -> MultivariateSeries:
    """Resample every channel onto a shared uniform grid by LOCF.

    The grid spans the earliest to the latest observation across channels.
    Every channel must have an observation at or before the grid origin,
    otherwise there is nothing to carry forward.
    """
    if not rate_hz > 0:
        raise ConfigurationError(f"rate_hz must be positive, got {rate_hz}")
    origin = min(times[0] for times, _ in log.samples.values())
    end = max(times[-1] for times, _ in log.samples.values())
    length = int(math.floor((end - origin) * rate_hz + TIME_JITTER_S)) + 1
    grid = TimeGrid(rate_hz=rate_hz, length=length, origin_s=origin)
    grid_times = grid.timestamps()

    rows = np.empty((len(log.samples), length))
    names = []
    for row, (name, (times, values)) in enumerate(log.samples.items()):
        if times[0] > origin + TIME_JITTER_S:
            raise IngestionError(
                f"channel {name!r} has no observation at or before the grid "
                f"origin {origin}"
            )
        positions = np.searchsorted(times, grid_times + TIME_JITTER_S, side="right") - 1
        rows[row] = values[positions]
        names.append(name)
    return MultivariateSeries(grid=grid, channels=tuple(names), values=rows)


def minmax_normalize(series: MultivariateSeries) -> MultivariateSeries:
    """Rescale each channel to [0, 1]; constant channels collapse to zeros."""
    values = series.values.copy()
    for row, name in enumerate(series.channels):
        lo = values[row].min()
        hi = values[row].max()
        if hi == lo:
            logger.warning("channel %r is constant; normalizing to zeros", name)
            values[row] = 0.0
        else:
            values[row] = (values[row] - lo) / (hi - lo)
    return MultivariateSeries(grid=series.grid, channels=series.channels, values=values)


def align_labels(
    fault_events: Sequence[tuple[float, int]], grid: TimeGrid
) -> LabelTrack:
    """Zero-order hold of the fault state over the grid; 0 before any event."""
    events = [(float(t), int(s)) for t, s in fault_events]
    for (t0, _), (t1, _) in zip(events, events[1:]):
        if t1 < t0:
            raise IngestionError("fault events are not time-ordered")
    labels = np.zeros(grid.length, dtype=np.int8)
    if not events:
        return LabelTrack(labels)
    event_times = np.asarray([t for t, _ in events])
    event_states = np.asarray([s for _, s in events], dtype=np.int8)
    positions = np.searchsorted(event_times, grid.timestamps() + TIME_JITTER_S, side="right") - 1
    covered = positions >= 0
    labels[covered] = event_states[positions[covered]]
    return LabelTrack(labels)


def _events_from_labels(times: np.ndarray, states: np.ndarray) -> list[tuple[float, int]]:
    events = [(float(times[0]), int(states[0]))]
    changes = np.nonzero(np.diff(states))[0] + 1
    events.extend((float(times[i]), int(states[i])) for i in changes)
    return events


def load_labeled_csv(
    path,
    time_col: str = DEFAULT_TIME_COLUMN,
    label_col: str = DEFAULT_LABEL_COLUMN,
    rate_hz: float | None = None,
) -> LabeledDataset:
    """Read a labeled signal export into a dataset.

    The file must carry a header with one time column (seconds), one binary
    label column, and numeric channels. A uniform time grid (within 1e-6 s
    jitter) is taken as-is; otherwise the file is resampled at ``rate_hz``.
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        raise IngestionError(f"{path} is empty") from None
    if frame.empty:
        raise IngestionError(f"{path} has a header but no rows")
    for required in (time_col, label_col):
        if required not in frame.columns:
            raise IngestionError(f"{path} is missing the {required!r} column")

    times = pd.to_numeric(frame[time_col], errors="coerce").to_numpy(dtype=np.float64)
    if np.isnan(times).any():
        raise IngestionError(f"non-numeric values in time column {time_col!r}")
    if np.any(np.diff(times) <= 0):
        raise IngestionError(f"time column {time_col!r} must be strictly increasing")

    raw_labels = pd.to_numeric(frame[label_col], errors="coerce").to_numpy(dtype=np.float64)
    if np.isnan(raw_labels).any() or not np.isin(raw_labels, (0.0, 1.0)).all():
        raise IngestionError(f"label column {label_col!r} must contain only 0/1")
    label_states = raw_labels.astype(np.int8)

    channel_names = [c for c in frame.columns if c not in (time_col, label_col)]
    if not channel_names:
        raise IngestionError(f"{path} has no signal channels")
    channel_values = np.empty((len(channel_names), len(frame)))
    for row, name in enumerate(channel_names):
        column = pd.to_numeric(frame[name], errors="coerce").to_numpy(dtype=np.float64)
        if np.isnan(column).any():
            bad = int(np.nonzero(np.isnan(column))[0][0])
            raise IngestionError(
                f"non-numeric or missing value in channel {name!r} at row {bad}"
            )
        channel_values[row] = column

    steps = np.diff(times)
    uniform = len(steps) > 0 and float(np.ptp(steps)) <= TIME_JITTER_S
    if uniform:
        grid = TimeGrid(
            rate_hz=1.0 / float(np.median(steps)),
            length=len(times),
            origin_s=float(times[0]),
        )
        series = MultivariateSeries(
            grid=grid, channels=tuple(channel_names), values=channel_values
        )
        labels = LabelTrack(label_states)
    else:
        if rate_hz is None:
            raise IngestionError(
                f"{path} is not on a uniform grid; pass rate_hz to resample"
            )
        log = RawSignalLog(
            samples={
                name: (times, channel_values[row])
                for row, name in enumerate(channel_names)
            },
            fault_events=tuple(_events_from_labels(times, label_states)),
        )
        series = resample_uniform(log, rate_hz)
        labels = align_labels(log.fault_events, series.grid)
    return LabeledDataset(name=path.stem, series=series, labels=labels)


def write_labeled_csv(
    dataset: LabeledDataset,
    path,
    time_col: str = DEFAULT_TIME_COLUMN,
    label_col: str = DEFAULT_LABEL_COLUMN,
) -> None:
    """Write a dataset in the layout load_labeled_csv expects."""
    frame = pd.DataFrame({time_col: dataset.series.grid.timestamps()})
    for row, name in enumerate(dataset.series.channels):
        frame[name] = dataset.series.values[row]
    frame[label_col] = dataset.labels.labels.astype(int)
    frame.to_csv(path, index=False)


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of the synthetic intermittent-fault generator."""

    channels: int = 8
    length: int = 1500
    rate_hz: float = 100.0
    ar_coefficient: float = 0.9
    noise_sigma: float = 0.1
    n_fault_zones: int = 5
    zone_length_range: tuple[int, int] = (40, 250)
    affected_channel_fraction: float = 0.25
    shift_magnitude: float = 1.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.channels < 1 or self.length < 1:
            raise ConfigurationError("channels and length must be positive")
        if not -1.0 < self.ar_coefficient < 1.0:
            raise ConfigurationError(
                f"ar_coefficient must lie in (-1, 1), got {self.ar_coefficient}"
            )
        if self.noise_sigma < 0:
            raise ConfigurationError("noise_sigma must be nonnegative")
        if self.n_fault_zones < 0:
            raise ConfigurationError("n_fault_zones must be nonnegative")
        lo, hi = self.zone_length_range
        if not (1 <= lo <= hi):
            raise ConfigurationError(
                f"zone_length_range must satisfy 1 <= lo <= hi, got {self.zone_length_range}"
            )
        if not 0.0 < self.affected_channel_fraction <= 1.0:
            raise ConfigurationError(
                "affected_channel_fraction must lie in (0, 1]"
            )
        if self.seed < 0:
            raise ConfigurationError("seed must be unsigned")


def _place_zones(
    rng: np.random.Generator, length: int, lengths: np.ndarray
) -> list[tuple[int, int]]:
    """Non-overlapping 0-based [start, end) zones with >= 1 sample between them."""
    zones = lengths.shape[0]
    total = int(lengths.sum())
    spare = length - total - (zones - 1)
    if spare < 0:
        raise ConfigurationError(
            f"{zones} fault zones of total length {total} cannot be placed "
            f"without overlap in {length} samples"
        )
    offsets = np.sort(rng.integers(0, spare + 1, size=zones))
    placements = []
    cursor = 0
    for i in range(zones):
        start = int(offsets[i]) + cursor + i
        placements.append((start, start + int(lengths[i])))
        cursor += int(lengths[i])
    return placements


def synthesize(config: SynthConfig) -> LabeledDataset:
    """Generate an AR(1) dataset with intermittent mean-shift fault zones.

    Inside each zone a seeded random subset of channels is shifted by
    ``shift_magnitude``; labels are 1 exactly inside zones. Identical configs
    produce bit-identical datasets.
    """
    rng = np.random.default_rng(config.seed)
    m, length = config.channels, config.length
    phi, noise_sigma = config.ar_coefficient, config.noise_sigma

    stationary_sd = noise_sigma / math.sqrt(1.0 - phi * phi)
    values = np.empty((m, length))
    values[:, 0] = rng.normal(0.0, stationary_sd, size=m)
    noise = rng.normal(0.0, noise_sigma, size=(m, length))
    for t in range(1, length):
        values[:, t] = phi * values[:, t - 1] + noise[:, t]

    labels = np.zeros(length, dtype=np.int8)
    if config.n_fault_zones > 0:
        lo, hi = config.zone_length_range
        zone_lengths = rng.integers(lo, hi + 1, size=config.n_fault_zones)
        affected_count = int(math.ceil(config.affected_channel_fraction * m))
        for start, end in _place_zones(rng, length, zone_lengths):
            affected = rng.choice(m, size=affected_count, replace=False)
            values[affected, start:end] += config.shift_magnitude
            labels[start:end] = 1

    series = MultivariateSeries(
        grid=TimeGrid(rate_hz=config.rate_hz, length=length),
        channels=tuple(f"ch{idx:02d}" for idx in range(m)),
        values=values,
    )
    return LabeledDataset(
        name=f"synth-seed{config.seed}", series=series, labels=LabelTrack(labels)
    )
