"""Random convolutional kernel transform with a logistic head.

Kernels are drawn by rule: length uniform over {7, 9, 11}, standard-normal
weights mean-centered, bias uniform on [-1, 1], dilation 2**x with x uniform
on [0, log2((L-1)/(l-1))], and centered zero padding with probability 1/2.
Each kernel contributes two features per window: the proportion of positive
convolution outputs (PPV) and the maximum output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import ConfigurationError
from .base import as_windows, check_feature_shape
from .logistic import LogisticHead

KERNEL_LENGTHS = (7, 9, 11)
DEFAULT_NUM_KERNELS = 10_000


@dataclass(frozen=True, eq=False)
class RocketKernel:
    length: int
    weights: np.ndarray
    bias: float
    dilation: int
    centered_padding: bool

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.shape != (self.length,):
            raise ValueError(
                f"{weights.shape[0]} weights for a kernel of length {self.length}"
            )
        if abs(float(weights.sum())) > 1e-9:
            raise ValueError("kernel weights must be mean-centered")
        if self.dilation < 1:
            raise ValueError(f"dilation must be >= 1, got {self.dilation}")
        weights.flags.writeable = False
        object.__setattr__(self, "weights", weights)

    @property
    def span(self) -> int:
        """Input positions covered by the dilated kernel, minus one."""
        return (self.length - 1) * self.dilation

    @property
    def padding(self) -> int:
        return self.span // 2 if self.centered_padding else 0


def generate_kernels(
    num_kernels: int, series_length: int, rng: np.random.Generator
) -> list[RocketKernel]:
    """Draw kernels whose dilated span always fits the input length."""
    if num_kernels < 1:
        raise ConfigurationError(f"num_kernels must be >= 1, got {num_kernels}")
    if series_length < max(KERNEL_LENGTHS):
        raise ConfigurationError(
            f"series length {series_length} is shorter than the largest kernel "
            f"({max(KERNEL_LENGTHS)})"
        )
    kernels = []
    lengths = np.asarray(KERNEL_LENGTHS)
    for _ in range(num_kernels):
        length = int(lengths[rng.integers(0, lengths.shape[0])])
        weights = rng.standard_normal(length)
        weights = weights - weights.mean()
        bias = float(rng.uniform(-1.0, 1.0))
        max_exponent = np.log2((series_length - 1) / (length - 1))
        dilation = int(2 ** rng.uniform(0.0, max_exponent))
        centered = bool(rng.integers(0, 2))
        kernels.append(
            RocketKernel(
                length=length,
                weights=weights,
                bias=bias,
                dilation=dilation,
                centered_padding=centered,
            )
        )
    return kernels


def rocket_generate(
    num_kernels: int, series_length: int, seed: int
) -> list[RocketKernel]:
    """Seeded kernel generation; identical seeds give identical kernel lists."""
    return generate_kernels(num_kernels, series_length, np.random.default_rng(seed))


def ppv_max(outputs: np.ndarray) -> tuple[float, float]:
    """(proportion of positive values, maximum) of one convolution output."""
    outputs = np.asarray(outputs, dtype=np.float64)
    return float(np.mean(outputs > 0.0)), float(outputs.max())


def rocket_transform(
    windows: np.ndarray, kernels: list[RocketKernel]
) -> np.ndarray:
    """Feature matrix of (PPV, max) per kernel, shape (n, 2 * len(kernels)).

    Kernel weights are shared across channels and channel outputs aggregate
    by summation, so the channel sum is convolved once per kernel; the bias
    enters once per output position.
    """
    windows = as_windows(windows)
    summed = windows.sum(axis=1)
    n, length = summed.shape
    features = np.empty((n, 2 * len(kernels)))
    for j, kernel in enumerate(kernels):
        pad = kernel.padding
        out_len = length + 2 * pad - kernel.span
        if out_len < 1:
            raise ValueError(
                f"window length {length} is too short for kernel span "
                f"{kernel.span} (padding {pad})"
            )
        padded = np.pad(summed, ((0, 0), (pad, pad))) if pad else summed
        positions = (
            np.arange(out_len)[:, np.newaxis]
            + np.arange(kernel.length)[np.newaxis, :] * kernel.dilation
        )
        outputs = padded[:, positions] @ kernel.weights + kernel.bias
        features[:, 2 * j] = np.mean(outputs > 0.0, axis=1)
        features[:, 2 * j + 1] = outputs.max(axis=1)
    return features


class RocketScorer:
    """Kernel transform plus standardizing logistic head."""

    def __init__(self, num_kernels: int = DEFAULT_NUM_KERNELS) -> None:
        self.num_kernels = num_kernels
        self.kernels: list[RocketKernel] | None = None
        self.head: LogisticHead | None = None
        self._shape: tuple[int, int] | None = None

    def fit(self, windows: np.ndarray, labels: np.ndarray, rng: np.random.Generator) -> None:
        windows = as_windows(windows)
        self._shape = windows.shape[1:]
        self.kernels = generate_kernels(self.num_kernels, windows.shape[2], rng)
        features = rocket_transform(windows, self.kernels)
        self.head = LogisticHead().fit(features, labels)

    def scores(self, windows: np.ndarray) -> np.ndarray:
        windows = as_windows(windows)
        check_feature_shape(self._shape, windows)
        features = rocket_transform(windows, self.kernels)
        return self.head.decision_scores(features)
