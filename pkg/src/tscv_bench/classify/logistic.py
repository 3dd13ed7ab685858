"""L2-regularized logistic regression trained by full-batch gradient descent.

Fixed schedule: learning rate 0.1 for 200 epochs, L2 weight 1e-4 on the
weights (never the intercept). Weights start at zero, so an unfitted head
scores 0.5 everywhere and training is fully deterministic.
"""

from __future__ import annotations

import numpy as np

from .base import as_windows, check_feature_shape
from .features import flatten_windows

LEARNING_RATE = 0.1
EPOCHS = 200
L2_WEIGHT = 1e-4


def sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))


def loss_and_gradient(
    weights: np.ndarray,
    intercept: float,
    X: np.ndarray,
    y: np.ndarray,
    l2: float = L2_WEIGHT,
) -> tuple[float, np.ndarray, float]:
    """Mean log loss plus L2 penalty, with its gradient.

    Returns (loss, d_loss/d_weights, d_loss/d_intercept). Uses the
    numerically stable log(1 + exp(z)) formulation.
    """
    z = X @ weights + intercept
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + 0.5 * l2 * float(
        weights @ weights
    )
    error = sigmoid(z) - y
    grad_weights = X.T @ error / X.shape[0] + l2 * weights
    grad_intercept = float(error.mean())
    return loss, grad_weights, grad_intercept


class LogisticHead:
    """Standardizing logistic scorer over a plain 2-D feature matrix.

    Standardization statistics come from the training block only and are
    applied unchanged at prediction time.
    """

    def __init__(
        self,
        learning_rate: float = LEARNING_RATE,
        epochs: int = EPOCHS,
        l2: float = L2_WEIGHT,
        standardize: bool = True,
    ) -> None:
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.l2 = l2
        self.standardize = standardize
        self.weights: np.ndarray | None = None
        self.intercept: float = 0.0
        self.loss_history: list[float] = []
        self._mean: np.ndarray | None = None
        self._scale: np.ndarray | None = None

    def _transform(self, X: np.ndarray) -> np.ndarray:
        if not self.standardize:
            return X
        return (X - self._mean) / self._scale

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LogisticHead":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if self.standardize:
            self._mean = X.mean(axis=0)
            scale = X.std(axis=0)
            scale[scale == 0.0] = 1.0
            self._scale = scale
        X = self._transform(X)

        self.weights = np.zeros(X.shape[1])
        self.intercept = 0.0
        self.loss_history = []
        for _ in range(self.epochs):
            loss, grad_w, grad_b = loss_and_gradient(
                self.weights, self.intercept, X, y, self.l2
            )
            self.loss_history.append(loss)
            self.weights = self.weights - self.learning_rate * grad_w
            self.intercept = self.intercept - self.learning_rate * grad_b
        return self

    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        X = self._transform(np.asarray(X, dtype=np.float64))
        return sigmoid(X @ self.weights + self.intercept)


class LogisticScorer:
    """Logistic head over flattened feature windows."""

    def __init__(self) -> None:
        self.head = LogisticHead()
        self._shape: tuple[int, int] | None = None

    def fit(self, windows: np.ndarray, labels: np.ndarray, rng: np.random.Generator) -> None:
        windows = as_windows(windows)
        self._shape = windows.shape[1:]
        self.head.fit(flatten_windows(windows), labels)

    def scores(self, windows: np.ndarray) -> np.ndarray:
        windows = as_windows(windows)
        check_feature_shape(self._shape, windows)
        return self.head.decision_scores(flatten_windows(windows))
