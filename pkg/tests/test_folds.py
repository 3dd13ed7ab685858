import numpy as np
import pytest

from tscv_bench.core import ConfigurationError, LabelTrack, Strategy
from tscv_bench.folds import (
    MIN_TRAIN_WINDOW,
    derive_omega,
    fold_validity,
    plan,
    plan_sliding_window,
    plan_walk_forward,
)

from conftest import make_dataset
from oracles import enumerate_definitional_sets, fold_index_arrays


def test_derive_omega_examples():
    assert derive_omega(1500, 9, 150) == 150
    assert derive_omega(2490, 3, 150) == 2040


def test_derive_omega_too_short():
    with pytest.raises(ConfigurationError, match="at least"):
        derive_omega(1000, 9, 150)


def test_derive_omega_minimum_train_window():
    # omega would be 10 < MIN_TRAIN_WINDOW.
    with pytest.raises(ConfigurationError):
        derive_omega(2 * 5 + 10, 2, 5)
    assert derive_omega(2 * 5 + MIN_TRAIN_WINDOW, 2, 5) == MIN_TRAIN_WINDOW


def test_walk_forward_example_folds():
    plan_wf = plan_walk_forward(1500, 3, 150)
    assert plan_wf.omega == 1050
    expected = [
        (1, 1050, 1051, 1200),
        (1, 1200, 1201, 1350),
        (1, 1350, 1351, 1500),
    ]
    got = [
        (f.train_start, f.train_end, f.test_start, f.test_end) for f in plan_wf
    ]
    assert got == expected


def test_sliding_window_example_folds():
    plan_sw = plan_sliding_window(1500, 3, 150)
    expected = [
        (1, 1050, 1051, 1200),
        (151, 1200, 1201, 1350),
        (301, 1350, 1351, 1500),
    ]
    got = [
        (f.train_start, f.train_end, f.test_start, f.test_end) for f in plan_sw
    ]
    assert got == expected


def test_walk_forward_nesting():
    plan_wf = plan_walk_forward(300, 7, 20)
    for earlier, later in zip(plan_wf.folds, plan_wf.folds[1:]):
        assert earlier.train_start == later.train_start == 1
        assert earlier.train_end < later.train_end


def test_sliding_window_constancy_and_overlap():
    plan_sw = plan_sliding_window(300, 7, 20)
    omega = plan_sw.omega
    for fold in plan_sw:
        assert fold.train_length == omega
    for earlier, later in zip(plan_sw.folds, plan_sw.folds[1:]):
        overlap = earlier.train_end - later.train_start + 1
        assert overlap == omega - plan_sw.delta


def test_test_blocks_identical_across_strategies():
    for n, k, d in [(300, 7, 20), (1500, 3, 150), (121, 5, 9)]:
        wf = plan_walk_forward(n, k, d)
        sw = plan_sliding_window(n, k, d)
        for fold_wf, fold_sw in zip(wf, sw):
            assert (fold_wf.test_start, fold_wf.test_end) == (
                fold_sw.test_start,
                fold_sw.test_end,
            )


def test_plans_match_definitional_enumeration_small_sweep():
    for n in range(60, 201, 14):
        for k in range(2, 10):
            for d in range(5, 21, 5):
                omega = n - k * d
                if omega < MIN_TRAIN_WINDOW:
                    continue
                for strategy in Strategy:
                    built = plan(strategy, n, k, d)
                    oracle = enumerate_definitional_sets(strategy, omega, k, d, n)
                    for fold, (train, test) in zip(built, oracle):
                        got_train, got_test = fold_index_arrays(fold)
                        np.testing.assert_array_equal(got_train, train)
                        np.testing.assert_array_equal(got_test, test)
                    assert all(f.train_end < f.test_start for f in built)


def test_explicit_omega_discards_trailing_samples(caplog):
    with caplog.at_level("WARNING"):
        plan_wf = plan_walk_forward(130, 2, 10, omega=100)
    assert plan_wf.span == 120
    assert "discard" in caplog.text
    with pytest.raises(ConfigurationError):
        plan_walk_forward(130, 2, 10, omega=120)


def test_fold_validity_examples():
    plan_wf = plan_walk_forward(28, 2, 4)
    fold = plan_wf.folds[0]
    assert fold.test_length == 4

    def validity(test_labels):
        labels = np.zeros(28, dtype=np.int8)
        labels[fold.test_slice()] = test_labels
        return fold_validity(LabelTrack(labels), fold)

    assert validity([0, 0, 0, 0]) == (0.0, False)
    assert validity([1, 1, 1, 1]) == (1.0, False)
    assert validity([1, 0, 0, 1]) == (0.5, True)


def test_fold_validity_on_dataset_labels():
    dataset = make_dataset([0] * 24 + [1, 0, 0, 1])
    plan_sw = plan_sliding_window(28, 2, 4)
    fold = plan_sw.folds[1]
    ratio, valid = fold_validity(dataset.labels, fold)
    assert (ratio, valid) == (0.5, True)


def test_fold_validity_bounds():
    labels = LabelTrack(np.zeros(10, dtype=np.int8))
    fold = plan_walk_forward(28, 2, 4).folds[1]
    with pytest.raises(IndexError):
        fold_validity(labels, fold)
