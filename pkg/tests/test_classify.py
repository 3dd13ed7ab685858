import numpy as np
import pytest

from tscv_bench.classify import (
    DecisionTree,
    LogisticHead,
    MajorityPrior,
    RandomForest,
    ResidualThreshold,
    TrainingError,
    build_windows,
    fit,
    loss_and_gradient,
    predict_scores,
    residual_score,
    window_residuals,
)

def toy_windows(x):
    """Single-channel, single-step windows from a 1-D feature list."""
    return np.asarray(x, dtype=np.float64).reshape(-1, 1, 1)


# ---------------------------------------------------------------- majority


def test_majority_prior_class_frequency():
    scorer = MajorityPrior()
    scorer.fit(toy_windows([0, 0, 0, 1]), np.array([0, 0, 0, 1]), np.random.default_rng(0))
    assert scorer.prior == 0.25
    np.testing.assert_allclose(scorer.scores(toy_windows([5, 6, 7])), [0.25] * 3)


def test_majority_tolerates_single_class():
    scorer = MajorityPrior()
    scorer.fit(toy_windows([1, 2, 3]), np.array([0, 0, 0]), np.random.default_rng(0))
    assert scorer.prior == 0.0


# ---------------------------------------------------------------- residual


def test_residual_score_zero_deviation():
    observed = np.arange(12.0).reshape(3, 4)
    assert residual_score(observed, observed) == 0.0


def test_residual_score_unit_norm_steps_and_threshold():
    observed = np.zeros((3, 5))
    predicted = np.zeros((3, 5))
    predicted[0, :] = 1.0  # deviation vector of norm 1 at each of 5 steps
    score = residual_score(observed, predicted)
    assert score == pytest.approx(5.0)
    tau = 4.0
    assert score > tau  # flagged as outlier


def test_residual_score_shape_mismatch():
    with pytest.raises(ValueError):
        residual_score(np.zeros((2, 3)), np.zeros((2, 4)))


def test_window_residuals_persistence_predictor():
    # One channel, window [1, 1, 4]: |1-1| + |4-1| = 3.
    windows = np.array([[[1.0, 1.0, 4.0]]])
    assert window_residuals(windows)[0] == pytest.approx(3.0)


def test_residual_threshold_scores_bounded():
    rng = np.random.default_rng(3)
    train = rng.normal(size=(50, 2, 8))
    test = rng.normal(size=(20, 2, 8)) * 5.0
    scorer = ResidualThreshold()
    scorer.fit(train, np.zeros(50, dtype=np.int8), rng)
    scores = scorer.scores(test)
    assert scores.min() >= 0.0 and scores.max() <= 1.0
    assert scores.max() == 1.0  # inflated test deviations saturate


def test_residual_threshold_constant_training_block():
    train = np.ones((20, 2, 4))
    scorer = ResidualThreshold()
    scorer.fit(train, np.zeros(20, dtype=np.int8), np.random.default_rng(0))
    test = np.ones((3, 2, 4))
    test[1, 0, -1] = 2.0
    np.testing.assert_allclose(scorer.scores(test), [0.0, 1.0, 0.0])


# ---------------------------------------------------------------- logistic


def independent_gd_losses(X, y, lr, epochs, l2):
    """Straight-line reimplementation of the fixed training schedule."""
    w = np.zeros(X.shape[1])
    b = 0.0
    losses = []
    for _ in range(epochs):
        p = 1.0 / (1.0 + np.exp(-(X @ w + b)))
        nll = -np.mean(y * np.log(p) + (1 - y) * np.log(1 - p))
        losses.append(float(nll + 0.5 * l2 * np.sum(w * w)))
        gw = X.T @ (p - y) / len(y) + l2 * w
        gb = float(np.mean(p - y))
        w = w - lr * gw
        b = b - lr * gb
    return losses


def test_logistic_toy_loss_matches_oracle_and_decreases():
    x = np.array([0.0, 0.0, 1.0, 1.0])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    head = LogisticHead()
    head.fit(x.reshape(-1, 1), y)

    standardized = ((x - x.mean()) / x.std()).reshape(-1, 1)
    expected = independent_gd_losses(standardized, y, head.learning_rate, head.epochs, head.l2)
    np.testing.assert_allclose(head.loss_history, expected, rtol=1e-10)
    diffs = np.diff(head.loss_history)
    assert (diffs < 0).all()


def test_logistic_zero_weights_scores_half():
    head = LogisticHead(epochs=0)
    head.fit(np.random.default_rng(0).normal(size=(8, 3)), np.array([0, 1] * 4))
    np.testing.assert_allclose(head.decision_scores(np.ones((5, 3))), [0.5] * 5)


def test_logistic_gradient_matches_finite_differences(rng):
    X = rng.normal(size=(12, 4))
    y = rng.integers(0, 2, size=12).astype(float)
    w = rng.normal(size=4) * 0.5
    b = float(rng.normal()) * 0.5
    _, grad_w, grad_b = loss_and_gradient(w, b, X, y, l2=1e-4)

    eps = 1e-6
    numeric = np.empty(4)
    for i in range(4):
        w_hi, w_lo = w.copy(), w.copy()
        w_hi[i] += eps
        w_lo[i] -= eps
        loss_hi, _, _ = loss_and_gradient(w_hi, b, X, y, l2=1e-4)
        loss_lo, _, _ = loss_and_gradient(w_lo, b, X, y, l2=1e-4)
        numeric[i] = (loss_hi - loss_lo) / (2 * eps)
    np.testing.assert_allclose(grad_w, numeric, rtol=1e-5)

    loss_hi, _, _ = loss_and_gradient(w, b + eps, X, y, l2=1e-4)
    loss_lo, _, _ = loss_and_gradient(w, b - eps, X, y, l2=1e-4)
    assert grad_b == pytest.approx((loss_hi - loss_lo) / (2 * eps), rel=1e-5)


# ---------------------------------------------------------------- forest


def brute_force_best_cost(X, y):
    """Minimal weighted Gini over all features and midpoint thresholds."""
    n = len(y)
    best = np.inf
    for feature in range(X.shape[1]):
        values = np.unique(X[:, feature])
        for lo, hi in zip(values, values[1:]):
            threshold = 0.5 * (lo + hi)
            left = y[X[:, feature] <= threshold]
            right = y[X[:, feature] > threshold]
            gini = 0.0
            for side in (left, right):
                p = side.mean()
                gini += len(side) * 2.0 * p * (1.0 - p)
            best = min(best, gini / n)
    return best


def split_cost(X, y, feature, threshold):
    mask = X[:, feature] <= threshold
    cost = 0.0
    for side in (y[mask], y[~mask]):
        p = side.mean()
        cost += len(side) * 2.0 * p * (1.0 - p)
    return cost / len(y)


def test_stump_splits_toy_at_midpoint():
    X = np.array([[0.0], [0.0], [1.0], [1.0]])
    y = np.array([0, 0, 1, 1], dtype=np.int8)
    tree = DecisionTree(max_depth=1)
    tree.fit(X, y, np.random.default_rng(0))
    assert tree._feature[0] == 0
    assert tree._threshold[0] == 0.5
    np.testing.assert_array_equal(tree.predict(X), y)  # training accuracy 1.0


def test_tree_root_split_is_exhaustively_optimal(rng):
    for _ in range(20):
        X = rng.normal(size=(30, 4))
        y = rng.integers(0, 2, size=30).astype(np.int8)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        tree = DecisionTree(max_depth=1)
        tree.fit(X, y, rng)
        if tree._feature[0] == -1:
            continue
        chosen = split_cost(X, y, tree._feature[0], tree._threshold[0])
        assert chosen == pytest.approx(brute_force_best_cost(X, y), abs=1e-12)


def test_single_tree_depth_one_forest_on_toy():
    X = np.array([[0.0], [0.0], [1.0], [1.0]])
    y = np.array([0, 0, 1, 1], dtype=np.int8)
    forest = RandomForest(n_trees=1, max_depth=1, bootstrap=False)
    forest.fit(X, y, np.random.default_rng(0))
    [tree] = forest._trees
    assert tree._threshold[0] == 0.5
    np.testing.assert_allclose(forest.scores(X), y)  # training accuracy 1.0


def test_forest_vote_fraction():
    class StubTree:
        def __init__(self, vote):
            self.vote = vote

        def predict(self, X):
            return np.full(X.shape[0], self.vote, dtype=np.int8)

    forest = RandomForest(n_trees=3)
    forest._trees = [StubTree(1), StubTree(1), StubTree(0)]
    np.testing.assert_allclose(forest.scores(np.zeros((4, 2))), [2.0 / 3.0] * 4)


def test_forest_pure_class_training(rng):
    X = rng.normal(size=(40, 3))
    forest = RandomForest(n_trees=10, max_depth=4)
    forest.fit(X, np.ones(40, dtype=np.int8), rng)
    np.testing.assert_allclose(forest.scores(rng.normal(size=(8, 3))), 1.0)


def test_forest_scores_within_unit_interval(rng):
    X = rng.normal(size=(60, 5))
    y = rng.integers(0, 2, size=60).astype(np.int8)
    forest = RandomForest(n_trees=15, max_depth=3)
    forest.fit(X, y, rng)
    scores = forest.scores(rng.normal(size=(30, 5)))
    assert scores.min() >= 0.0 and scores.max() <= 1.0


# ------------------------------------------------------------ fit dispatch


def _training_windows(n=24, seed=0):
    rng = np.random.default_rng(seed)
    windows = rng.normal(size=(n, 2, 12))
    labels = (rng.uniform(size=n) < 0.5).astype(np.int8)
    labels[0], labels[1] = 0, 1
    return windows, labels


def test_fit_rejects_small_training_sets():
    windows, labels = _training_windows(n=6)
    with pytest.raises(TrainingError, match="minimum"):
        fit("majority", windows, labels, seed=0)


def test_fit_rejects_single_class_for_discriminative():
    windows, _ = _training_windows(n=20)
    zeros = np.zeros(20, dtype=np.int8)
    for classifier_id in ("rf", "logistic", "rocket"):
        with pytest.raises(TrainingError, match="single-class"):
            fit(classifier_id, windows, zeros, seed=0, rocket_kernels=20)
    for classifier_id in ("majority", "residual"):
        fit(classifier_id, windows, zeros, seed=0)


def test_fit_label_length_mismatch():
    windows, labels = _training_windows(n=20)
    with pytest.raises(TrainingError):
        fit("majority", windows, labels[:10], seed=0)


def test_predict_scores_shape_error():
    windows, labels = _training_windows(n=20)
    model = fit("rf", windows, labels, seed=0)
    with pytest.raises(ValueError, match="shape"):
        predict_scores(model, np.zeros((5, 2, 9)))


@pytest.mark.parametrize("classifier_id", ["majority", "residual", "rf", "logistic", "rocket"])
def test_fit_is_deterministic_for_fixed_seed(classifier_id):
    windows, labels = _training_windows(n=30, seed=4)
    test = np.random.default_rng(9).normal(size=(10, 2, 12))
    model_a = fit(classifier_id, windows, labels, seed=123, rocket_kernels=30)
    model_b = fit(classifier_id, windows, labels, seed=123, rocket_kernels=30)
    np.testing.assert_array_equal(
        predict_scores(model_a, test), predict_scores(model_b, test)
    )


@pytest.mark.parametrize("classifier_id", ["majority", "residual", "rf", "logistic", "rocket"])
def test_scores_lie_in_unit_interval(classifier_id, synth_dataset):
    windows = build_windows(synth_dataset.series)
    labels = synth_dataset.labels.labels
    # Train across the first fault zone so both classes are present.
    first_positive = int(np.argmax(labels))
    start = max(0, first_positive - 100)
    train = slice(start, start + 200)
    test = slice(start + 200, start + 300)
    assert 0 < labels[train].sum() < 200
    model = fit(classifier_id, windows[train], labels[train], seed=5, rocket_kernels=30)
    scores = predict_scores(model, windows[test])
    assert scores.shape == (100,)
    assert scores.min() >= 0.0 and scores.max() <= 1.0
