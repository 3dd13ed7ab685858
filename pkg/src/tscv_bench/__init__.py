"""Temporal cross-validation benchmark for subsequence fault detection.

Walk-forward and sliding-window fold generation, per-fold classifier
training and scoring, AUC-PR evaluation under class imbalance, the
imbalance-sensitivity AUC, and nonparametric statistical comparison.
"""

__version__ = "0.1.0"

from .core import (
    ConfigurationError,
    ExperimentRecord,
    Fold,
    FoldPlan,
    LabelTrack,
    LabeledDataset,
    MultivariateSeries,
    ScoredFold,
    Strategy,
    TimeGrid,
    subsequence_view,
)

__all__ = [
    "__version__",
    "ConfigurationError",
    "ExperimentRecord",
    "Fold",
    "FoldPlan",
    "LabelTrack",
    "LabeledDataset",
    "MultivariateSeries",
    "ScoredFold",
    "Strategy",
    "TimeGrid",
    "subsequence_view",
]
