"""Mann-Whitney U comparison and ADF/KPSS stationarity screening.

The U test works from mid-ranks, with an exact null distribution (counting
recurrence) for small tie-free samples and a tie-corrected normal
approximation with continuity correction 0.5 otherwise.

Both stationarity tests use constant-only specifications so the statistics
are invariant under adding a constant to the series. The lag/bandwidth policy
is the deterministic rule ``floor(12 * (n/100)^(1/4))``; no information
criterion search, so repeated runs are reproducible. 5% critical values are
shipped as embedded tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import LabeledDataset

__all__ = [
    "UTestResult",
    "mann_whitney_u",
    "exact_eligible",
    "schwert_lag",
    "adf_test",
    "kpss_test",
    "ChannelStationarity",
    "StationarityReport",
    "dataset_stationarity",
    "KPSS_CRITICAL_5PCT_LEVEL",
]

ALTERNATIVES = ("greater", "less", "two_sided")

# Largest per-sample size for which the exact U distribution is enumerated.
EXACT_MAX_N = 12

# 5% critical values for the unit-root t-ratio, constant-only regression,
# tabulated by effective sample size and interpolated linearly in 1/n.
_ADF_CV_5PCT = ((25, -3.00), (50, -2.93), (100, -2.89), (250, -2.88), (500, -2.87))
_ADF_CV_5PCT_ASYMPTOTIC = -2.86

# 5% critical value of the level-stationarity LM statistic.
KPSS_CRITICAL_5PCT_LEVEL = 0.463


def _normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def _midranks(values: np.ndarray) -> np.ndarray:
    """Ranks starting at 1; tied values share the mean of their rank range."""
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    ranks = np.empty(values.shape[0], dtype=np.float64)
    i = 0
    n = values.shape[0]
    while i < n:
        j = i
        while j + 1 < n and sorted_values[j + 1] == sorted_values[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _tie_counts(values: np.ndarray) -> np.ndarray:
    _, counts = np.unique(values, return_counts=True)
    return counts


def exact_u_counts(n_a: int, n_b: int) -> np.ndarray:
    """Null distribution of U as arrangement counts, counts[u] for u in 0..n_a*n_b.

    Uses the standard recurrence f(a, b)[u] = f(a-1, b)[u-b] + f(a, b-1)[u];
    the acceptance suite checks it against full enumeration of rank subsets.
    """
    table: dict[tuple[int, int], np.ndarray] = {}
    for a in range(n_a + 1):
        for b in range(n_b + 1):
            counts = np.zeros(a * b + 1, dtype=np.int64)
            if a == 0 or b == 0:
                counts[0] = 1
            else:
                smaller_a = table[(a - 1, b)]
                smaller_b = table[(a, b - 1)]
                counts[b : b + smaller_a.shape[0]] += smaller_a
                counts[: smaller_b.shape[0]] += smaller_b
            table[(a, b)] = counts
    return table[(n_a, n_b)]


def exact_eligible(sample_a: np.ndarray, sample_b: np.ndarray) -> bool:
    """Exact enumeration applies only to small, tie-free samples."""
    if sample_a.shape[0] > EXACT_MAX_N or sample_b.shape[0] > EXACT_MAX_N:
        return False
    pooled = np.concatenate([sample_a, sample_b])
    return np.unique(pooled).shape[0] == pooled.shape[0]


@dataclass(frozen=True)
class UTestResult:
    """Mann-Whitney U outcome; u_statistic is U for the first sample."""

    u_statistic: float
    p_value: float
    alternative: str
    method: str


def mann_whitney_u(
    sample_a: Sequence[float],
    sample_b: Sequence[float],
    alternative: str = "two_sided",
    method: str = "auto",
) -> UTestResult:
    """Test for a location difference between two samples.

    ``alternative='greater'`` means the first sample tends to exceed the
    second. ``method`` is 'auto' (exact when eligible), 'exact', or
    'normal_approx'; requesting 'exact' outside its eligibility window is an
    error.
    """
    if alternative not in ALTERNATIVES:
        raise ValueError(f"alternative must be one of {ALTERNATIVES}")
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")

    n_a, n_b = a.shape[0], b.shape[0]
    pooled = np.concatenate([a, b])
    ranks = _midranks(pooled)
    rank_sum_a = float(ranks[:n_a].sum())
    u_a = rank_sum_a - n_a * (n_a + 1) / 2.0

    eligible = exact_eligible(a, b)
    if method == "auto":
        use_exact = eligible
    elif method == "exact":
        if not eligible:
            raise ValueError(
                f"exact method needs tie-free samples with n <= {EXACT_MAX_N}"
            )
        use_exact = True
    elif method == "normal_approx":
        use_exact = False
    else:
        raise ValueError("method must be 'auto', 'exact', or 'normal_approx'")

    if use_exact:
        counts = exact_u_counts(n_a, n_b)
        total = float(counts.sum())
        u_int = int(round(u_a))
        p_greater = float(counts[u_int:].sum()) / total
        p_less = float(counts[: u_int + 1].sum()) / total
        method_used = "exact"
    else:
        mu = n_a * n_b / 2.0
        n = n_a + n_b
        ties = _tie_counts(pooled)
        tie_term = float(((ties**3) - ties).sum()) / (n * (n - 1))
        variance = n_a * n_b / 12.0 * ((n + 1) - tie_term)
        if variance <= 0:
            # All pooled values identical: no evidence of any difference.
            p_greater = p_less = 1.0
        else:
            sd = math.sqrt(variance)
            p_greater = 1.0 - _normal_cdf((u_a - mu - 0.5) / sd)
            p_less = _normal_cdf((u_a - mu + 0.5) / sd)
        method_used = "normal_approx"

    if alternative == "greater":
        p_value = p_greater
    elif alternative == "less":
        p_value = p_less
    else:
        p_value = min(1.0, 2.0 * min(p_greater, p_less))
    return UTestResult(
        u_statistic=float(u_a),
        p_value=float(p_value),
        alternative=alternative,
        method=method_used,
    )


def schwert_lag(n: int) -> int:
    """Deterministic lag/bandwidth rule floor(12 * (n/100)^(1/4))."""
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def _adf_critical_5pct(nobs: int) -> float:
    points = list(_ADF_CV_5PCT)
    if nobs <= points[0][0]:
        return points[0][1]
    points.append((math.inf, _ADF_CV_5PCT_ASYMPTOTIC))
    for (n_lo, cv_lo), (n_hi, cv_hi) in zip(points, points[1:]):
        if nobs <= n_hi:
            x_lo = 1.0 / n_lo
            x_hi = 0.0 if math.isinf(n_hi) else 1.0 / n_hi
            weight = (1.0 / nobs - x_lo) / (x_hi - x_lo)
            return cv_lo + weight * (cv_hi - cv_lo)
    return _ADF_CV_5PCT_ASYMPTOTIC


def adf_test(
    values: Sequence[float], max_lag: int | None = None
) -> tuple[float | None, bool | None]:
    """Unit-root t-ratio from the constant-only augmented regression.

    Regresses the first difference on a constant, the lagged level, and
    ``max_lag`` lagged differences (default: the deterministic lag rule).
    Returns (stat, reject_at_5pct), or (None, None) when the statistic is not
    computable (short series, constant series, singular regression).
    """
    y = np.asarray(values, dtype=np.float64)
    n = y.shape[0]
    if n < 20:
        return (None, None)
    if np.ptp(y) == 0.0:
        return (None, None)
    lag = schwert_lag(n) if max_lag is None else int(max_lag)
    if lag < 0:
        raise ValueError(f"max_lag must be >= 0, got {lag}")

    dy = np.diff(y)
    nobs = dy.shape[0] - lag
    n_coefficients = 2 + lag
    if nobs < n_coefficients + 1:
        return (None, None)

    design = np.empty((nobs, n_coefficients))
    design[:, 0] = 1.0
    design[:, 1] = y[lag : n - 1]
    for j in range(1, lag + 1):
        design[:, 1 + j] = dy[lag - j : dy.shape[0] - j]
    response = dy[lag:]

    if np.linalg.matrix_rank(design) < n_coefficients:
        return (None, None)
    coef, _, _, _ = np.linalg.lstsq(design, response, rcond=None)
    residuals = response - design @ coef
    dof = nobs - n_coefficients
    residual_variance = float(residuals @ residuals) / dof
    if residual_variance <= 0.0:
        return (None, None)
    try:
        covariance = residual_variance * np.linalg.inv(design.T @ design)
    except np.linalg.LinAlgError:
        return (None, None)
    se = math.sqrt(float(covariance[1, 1]))
    if se == 0.0 or not math.isfinite(se):
        return (None, None)
    stat = float(coef[1]) / se
    return (stat, stat < _adf_critical_5pct(nobs))


def kpss_test(values: Sequence[float]) -> tuple[float | None, bool | None]:
    """Level-stationarity LM statistic with Newey-West long-run variance.

    Bartlett-kernel weights at the deterministic bandwidth rule. Returns
    (stat, reject_at_5pct), or (None, None) when the long-run variance
    degenerates (constant series) or the series is too short.
    """
    y = np.asarray(values, dtype=np.float64)
    n = y.shape[0]
    if n < 20:
        return (None, None)
    e = y - y.mean()
    if np.all(e == 0.0):
        return (None, None)

    partial_sums = np.cumsum(e)
    numerator = float((partial_sums**2).sum()) / (n * n)

    bandwidth = min(schwert_lag(n), n - 1)
    long_run_variance = float(e @ e) / n
    for j in range(1, bandwidth + 1):
        weight = 1.0 - j / (bandwidth + 1.0)
        long_run_variance += 2.0 * weight * float(e[j:] @ e[:-j]) / n
    if long_run_variance <= 0.0:
        return (None, None)
    stat = numerator / long_run_variance
    return (stat, stat > KPSS_CRITICAL_5PCT_LEVEL)


@dataclass(frozen=True)
class ChannelStationarity:
    """Per-channel test outcomes; None marks a not-computable statistic."""

    channel: str
    adf_stat: float | None
    adf_reject_5pct: bool | None
    kpss_stat: float | None
    kpss_reject_5pct: bool | None

    @property
    def computable(self) -> bool:
        return self.adf_reject_5pct is not None or self.kpss_reject_5pct is not None

    @property
    def fails_stationarity(self) -> bool:
        """True when either computable test contradicts stationarity.

        ADF contradicts stationarity by failing to reject its unit-root null;
        KPSS by rejecting its stationarity null.
        """
        adf_fails = self.adf_reject_5pct is False
        kpss_fails = self.kpss_reject_5pct is True
        return adf_fails or kpss_fails


@dataclass(frozen=True)
class StationarityReport:
    channels: tuple[ChannelStationarity, ...]
    overall_nonstationary: bool


def dataset_stationarity(
    dataset: LabeledDataset, max_lag: int | None = None
) -> StationarityReport:
    """Screen every channel with both tests.

    The multivariate process counts as non-stationary as soon as any channel
    fails either test's stationarity condition; channels where neither test
    is computable are excluded from that judgement.
    """
    rows = []
    for name, row in zip(dataset.series.channels, dataset.series.values):
        adf_stat, adf_reject = adf_test(row, max_lag=max_lag)
        kpss_stat, kpss_reject = kpss_test(row)
        rows.append(
            ChannelStationarity(
                channel=name,
                adf_stat=adf_stat,
                adf_reject_5pct=adf_reject,
                kpss_stat=kpss_stat,
                kpss_reject_5pct=kpss_reject,
            )
        )
    overall = any(row.computable and row.fails_stationarity for row in rows)
    return StationarityReport(channels=tuple(rows), overall_nonstationary=overall)
