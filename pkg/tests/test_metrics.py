import numpy as np
import pytest

from tscv_bench.core import Fold, ScoredFold
from tscv_bench.metrics import (
    AggregateRow,
    UndefinedMetricError,
    aggregate,
    average_precision,
    average_precision_score,
    median,
    pr_curve,
    sensitivity_auc,
    sigma,
)


from oracles import brute_force_average_precision


def make_scored_fold(k, positive_ratio, auc_pr, test_length=4):
    start = 10 * k
    fold = Fold(
        k=k,
        train_start=1,
        train_end=start - 1,
        test_start=start,
        test_end=start + test_length - 1,
    )
    valid = 0.0 < positive_ratio < 1.0
    return ScoredFold(
        fold=fold,
        scores=np.linspace(0.0, 1.0, test_length),
        positive_ratio=positive_ratio,
        valid=valid,
        auc_pr=auc_pr if valid else None,
    )


def test_pr_curve_hand_enumerated_example():
    curve = pr_curve([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0])
    np.testing.assert_allclose(curve.precisions, [1.0, 0.5, 2.0 / 3.0, 0.5])
    np.testing.assert_allclose(curve.recalls, [0.5, 0.5, 1.0, 1.0])
    np.testing.assert_allclose([p.threshold for p in curve.points], [0.9, 0.8, 0.7, 0.6])


def test_pr_curve_perfect_ranking_endpoints():
    curve = pr_curve([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
    assert curve.points[0].precision == 1.0
    assert curve.points[-1].recall == 1.0
    assert curve.points[-1].precision == 0.5  # prevalence at full recall


def test_pr_curve_all_scores_equal():
    curve = pr_curve([0.4, 0.4, 0.4, 0.4], [1, 0, 0, 0])
    assert len(curve.points) == 1
    assert curve.points[0].precision == 0.25
    assert curve.points[0].recall == 1.0


def test_pr_curve_rejects_single_class():
    with pytest.raises(UndefinedMetricError):
        pr_curve([0.1, 0.2], [1, 1])
    with pytest.raises(UndefinedMetricError):
        pr_curve([0.1, 0.2], [0, 0])


def test_average_precision_examples():
    curve = pr_curve([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0])
    assert average_precision(curve) == pytest.approx(
        0.5 * 1.0 + 0.5 * (2.0 / 3.0), abs=1e-15
    )
    assert average_precision_score([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
    # Single positive found last.
    assert average_precision_score([0.0, 1.0], [1, 0]) == 0.5


def test_average_precision_matches_brute_force_oracle(rng):
    for trial in range(300):
        n = int(rng.integers(2, 65))
        labels = rng.integers(0, 2, size=n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        if trial % 3 == 0:
            scores = rng.choice(np.linspace(0, 1, 5), size=n)  # heavy ties
        else:
            scores = rng.uniform(size=n)
        expected = brute_force_average_precision(scores, labels)
        assert average_precision_score(scores, labels) == pytest.approx(
            expected, abs=1e-12
        )


def test_average_precision_invariant_under_monotone_transform(rng):
    for _ in range(50):
        n = int(rng.integers(4, 40))
        labels = rng.integers(0, 2, size=n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        scores = rng.uniform(size=n)
        base = average_precision_score(scores, labels)
        for transform in (lambda s: 3.0 * s + 2.0, np.exp, lambda s: s**3):
            assert average_precision_score(transform(scores), labels) == pytest.approx(
                base, abs=1e-12
            )


def test_random_scores_median_ap_near_prevalence():
    rng = np.random.default_rng(99)
    prevalence = 0.3
    aps = []
    for _ in range(200):
        labels = (rng.uniform(size=60) < prevalence).astype(int)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        scores = rng.uniform(size=60)
        aps.append(average_precision_score(scores, labels))
    assert abs(median(aps) - prevalence) < 0.1


def test_sensitivity_auc_hand_example():
    folds = [
        make_scored_fold(1, 0.2, 0.5),
        make_scored_fold(2, 0.4, 0.7),
        make_scored_fold(3, 0.8, 0.9),
    ]
    assert sensitivity_auc(folds) == pytest.approx(0.44, abs=1e-12)


def test_sensitivity_auc_rectangle():
    folds = [make_scored_fold(k, r, 0.6) for k, r in enumerate([0.1, 0.3, 0.5], 1)]
    assert sensitivity_auc(folds) == pytest.approx(0.6 * (0.5 - 0.1), abs=1e-12)


def test_sensitivity_auc_insufficient_folds():
    assert sensitivity_auc([make_scored_fold(1, 0.5, 0.8)]) is None
    # Invalid folds do not count towards the minimum of two.
    folds = [make_scored_fold(1, 0.5, 0.8), make_scored_fold(2, 0.0, None)]
    assert sensitivity_auc(folds) is None


def test_sensitivity_auc_permutation_invariant(rng):
    folds = [
        make_scored_fold(k, float(r), float(s))
        for k, (r, s) in enumerate(
            zip(rng.uniform(0.05, 0.95, 9), rng.uniform(size=9)), 1
        )
    ]
    reference = sensitivity_auc(folds)
    for _ in range(100):
        shuffled = list(folds)
        rng.shuffle(shuffled)
        assert sensitivity_auc(shuffled) == pytest.approx(reference, abs=1e-15)


def test_sensitivity_auc_duplicate_ratios_zero_width():
    folds = [
        make_scored_fold(1, 0.4, 0.2),
        make_scored_fold(2, 0.4, 0.9),
    ]
    assert sensitivity_auc(folds) == pytest.approx(0.0, abs=1e-15)


def test_median_and_sigma_conventions():
    assert median([0.2, 0.8]) == pytest.approx(0.5)
    assert sigma([1.0, 1.0, 1.0]) == 0.0
    assert sigma([0.0, 1.0]) == pytest.approx(0.5)


def test_aggregate_groups_and_sorts():
    rows = aggregate([("b", 0.2), ("a", 0.0), ("b", 0.8), ("a", 1.0), ("a", 1.0)])
    assert rows == [
        AggregateRow(key=("a",), median=1.0, sigma=pytest.approx(0.4714045207910317), n=3),
        AggregateRow(key=("b",), median=0.5, sigma=pytest.approx(0.3), n=2),
    ]
    assert aggregate([]) == []
