"""CART decision trees with Gini splits and a bagged random forest.

The forest scores a sample with the fraction of trees voting for the positive
class, so scores are always in [0, 1] and a pure-class training set makes
every tree vote that class.
"""

from __future__ import annotations

import math

import numpy as np

from .base import as_windows, check_feature_shape
from .features import flatten_windows

_NO_FEATURE = -1


def _best_split(
    X: np.ndarray, y: np.ndarray, indices: np.ndarray, features: np.ndarray
) -> tuple[int, float] | None:
    """Exhaustive Gini search over the candidate features.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values. Ties in impurity resolve to the lowest split position, then the
    first candidate feature, which keeps tree growth deterministic.
    """
    columns = X[np.ix_(indices, features)]
    targets = y[indices].astype(np.float64)
    n = columns.shape[0]
    if n < 2:
        return None

    order = np.argsort(columns, axis=0, kind="stable")
    sorted_values = np.take_along_axis(columns, order, axis=0)
    sorted_targets = targets[order]

    left_pos = np.cumsum(sorted_targets, axis=0)[:-1]
    left_n = np.arange(1, n, dtype=np.float64)[:, np.newaxis]
    right_n = n - left_n
    right_pos = targets.sum() - left_pos

    usable = sorted_values[1:] > sorted_values[:-1]
    if not usable.any():
        return None

    p_left = left_pos / left_n
    p_right = right_pos / right_n
    gini_left = 2.0 * p_left * (1.0 - p_left)
    gini_right = 2.0 * p_right * (1.0 - p_right)
    cost = (left_n * gini_left + right_n * gini_right) / n
    cost[~usable] = np.inf

    flat = int(np.argmin(cost))
    row, col = divmod(flat, cost.shape[1])
    threshold = 0.5 * (sorted_values[row, col] + sorted_values[row + 1, col])
    return int(features[col]), float(threshold)


class DecisionTree:
    """Binary CART classifier; leaves vote by majority (ties go negative)."""

    def __init__(
        self,
        max_depth: int = 8,
        min_samples_split: int = 2,
        max_features: int | None = None,
    ) -> None:
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self._feature: np.ndarray | None = None
        self._threshold: np.ndarray | None = None
        self._left: np.ndarray | None = None
        self._right: np.ndarray | None = None
        self._vote: np.ndarray | None = None

    def fit(
        self,
        X: np.ndarray,
        y: np.ndarray,
        rng: np.random.Generator,
        sample_indices: np.ndarray | None = None,
    ) -> "DecisionTree":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int8)
        if sample_indices is None:
            sample_indices = np.arange(X.shape[0])
        n_features = X.shape[1]
        mtry = self.max_features or n_features
        mtry = min(mtry, n_features)

        feature: list[int] = []
        threshold: list[float] = []
        left: list[int] = []
        right: list[int] = []
        vote: list[int] = []

        def new_node() -> int:
            feature.append(_NO_FEATURE)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            vote.append(0)
            return len(feature) - 1

        def grow(node: int, indices: np.ndarray, depth: int) -> None:
            positives = int(y[indices].sum())
            n = indices.shape[0]
            vote[node] = 1 if 2 * positives > n else 0
            if (
                depth >= self.max_depth
                or positives in (0, n)
                or n < self.min_samples_split
            ):
                return
            if mtry < n_features:
                candidates = rng.choice(n_features, size=mtry, replace=False)
            else:
                candidates = np.arange(n_features)
            split = _best_split(X, y, indices, candidates)
            if split is None:
                return
            split_feature, split_threshold = split
            goes_left = X[indices, split_feature] <= split_threshold
            if goes_left.all() or not goes_left.any():
                # Midpoint rounded onto a data value; treat as unsplittable.
                return
            feature[node] = split_feature
            threshold[node] = split_threshold
            left[node] = new_node()
            right[node] = new_node()
            grow(left[node], indices[goes_left], depth + 1)
            grow(right[node], indices[~goes_left], depth + 1)

        root = new_node()
        grow(root, sample_indices, 0)

        self._feature = np.asarray(feature, dtype=np.int64)
        self._threshold = np.asarray(threshold, dtype=np.float64)
        self._left = np.asarray(left, dtype=np.int64)
        self._right = np.asarray(right, dtype=np.int64)
        self._vote = np.asarray(vote, dtype=np.int8)
        return self

    @property
    def node_count(self) -> int:
        return int(self._feature.shape[0])

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Class votes (0/1), one per row of X."""
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        out = np.empty(X.shape[0], dtype=np.int8)
        active = np.arange(X.shape[0])
        while active.size:
            current = node[active]
            at_leaf = self._feature[current] == _NO_FEATURE
            leaves = active[at_leaf]
            out[leaves] = self._vote[node[leaves]]
            active = active[~at_leaf]
            if active.size == 0:
                break
            current = node[active]
            goes_left = (
                X[active, self._feature[current]] <= self._threshold[current]
            )
            node[active] = np.where(
                goes_left, self._left[current], self._right[current]
            )
        return out


class RandomForest:
    """Bagged CART ensemble with per-split feature subsampling (ceil sqrt)."""

    def __init__(
        self,
        n_trees: int = 100,
        max_depth: int = 8,
        bootstrap: bool = True,
        min_samples_split: int = 2,
    ) -> None:
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.bootstrap = bootstrap
        self.min_samples_split = min_samples_split
        self._trees: list[DecisionTree] = []

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "RandomForest":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int8)
        n, d = X.shape
        mtry = int(math.ceil(math.sqrt(d)))
        self._trees = []
        for _ in range(self.n_trees):
            if self.bootstrap:
                indices = rng.integers(0, n, size=n)
            else:
                indices = np.arange(n)
            tree = DecisionTree(
                max_depth=self.max_depth,
                min_samples_split=self.min_samples_split,
                max_features=mtry,
            )
            tree.fit(X, y, rng, sample_indices=indices)
            self._trees.append(tree)
        return self

    def scores(self, X: np.ndarray) -> np.ndarray:
        """Fraction of trees voting positive, per sample."""
        votes = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self._trees:
            votes += tree.predict(X)
        return votes / len(self._trees)


class RandomForestScorer:
    """Forest over flattened feature windows."""

    def __init__(self, n_trees: int = 100, max_depth: int = 8, bootstrap: bool = True) -> None:
        self.forest = RandomForest(n_trees=n_trees, max_depth=max_depth, bootstrap=bootstrap)
        self._shape: tuple[int, int] | None = None

    def fit(self, windows: np.ndarray, labels: np.ndarray, rng: np.random.Generator) -> None:
        windows = as_windows(windows)
        self._shape = windows.shape[1:]
        self.forest.fit(flatten_windows(windows), labels, rng)

    def scores(self, windows: np.ndarray) -> np.ndarray:
        windows = as_windows(windows)
        check_feature_shape(self._shape, windows)
        return self.forest.scores(flatten_windows(windows))
