"""Income samples, the empirical CDF, and the classical poverty components.

Every estimator in the package consumes :class:`IncomeSample`, which stores a
validated, ascending-sorted copy of the data.  "Poor" always means income at
or below the poverty line (the inclusive convention used throughout).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSubsample, NoPoorObservations


def check_poverty_line(z: float) -> float:
    z = float(z)
    if not np.isfinite(z) or z <= 0.0:
        raise ValueError(f"poverty line must be a positive finite number, got {z!r}")
    return z


class IncomeSample:
    """Sorted sequence of nonnegative incomes, n >= 2.

    Construction sorts; the original order is not retained.  Zero incomes are
    legal, negative or non-finite incomes are rejected.  The stored array is
    read-only, so samples are safe to share across threads.
    """

    __slots__ = ("values", "n")

    def __init__(self, values) -> None:
        arr = np.array(values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("income data must be one-dimensional")
        if arr.size < 2:
            raise ValueError(f"need at least 2 observations, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("incomes must be finite")
        if float(arr.min()) < 0.0:
            raise ValueError("negative incomes are not allowed")
        arr.sort()
        arr.setflags(write=False)
        self.values = arr
        self.n = int(arr.size)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"IncomeSample(n={self.n}, min={self.values[0]:g}, max={self.values[-1]:g})"

    def poor_count(self, z: float) -> int:
        """Number of observations at or below z."""
        return int(np.searchsorted(self.values, check_poverty_line(z), side="right"))


@dataclass(frozen=True)
class PoorPartition:
    """Split of a sample at the poverty line: count, share and mean of the poor."""

    q: int
    headcount: float
    mean_poor: float | None  # None when q == 0


def empirical_cdf(sample: IncomeSample, x):
    """Right-continuous empirical CDF, #{X_i <= x} / n.  Accepts scalar or array x."""
    counts = np.searchsorted(sample.values, x, side="right")
    if np.ndim(x) == 0:
        return float(counts) / sample.n
    return counts / sample.n


def poor_partition(sample: IncomeSample, z: float) -> PoorPartition:
    """Count the poor (income <= z) and their mean income; q = 0 is legal."""
    z = check_poverty_line(z)
    q = sample.poor_count(z)
    mean_poor = float(sample.values[:q].mean()) if q >= 1 else None
    return PoorPartition(q=q, headcount=q / sample.n, mean_poor=mean_poor)


def income_gap_ratio(partition: PoorPartition, z: float) -> float:
    """Poverty intensity: one minus the mean poor income relative to the line."""
    z = check_poverty_line(z)
    if partition.q == 0:
        raise NoPoorObservations("income gap ratio undefined with no poor observations")
    return 1.0 - partition.mean_poor / z

def gini_among_poor(sample: IncomeSample, z: float) -> float:
    """Sample Gini of the poor subsample (mean absolute difference over 2*mean).

    Needs at least two poor observations with positive mean.
    """
    z = check_poverty_line(z)
    q = sample.poor_count(z)
    if q == 0:
        raise NoPoorObservations("Gini among the poor undefined with no poor observations")
    poor = sample.values[:q]
    mu = float(poor.mean())
    if q == 1 or mu == 0.0:
        raise DegenerateSubsample(
            f"Gini among the poor needs q >= 2 and positive mean (q={q}, mean={mu:g})"
        )
    # sum_{i,j} |x_i - x_j| = 2 * sum_i (2i - q - 1) x_(i) for ascending x
    ranks = np.arange(1, q + 1)
    abs_diff_sum = 2.0 * float(np.sum((2.0 * ranks - q - 1) * poor))
    return abs_diff_sum / (2.0 * q * q * mu)


def sen_from_components(partition: PoorPartition, gap_ratio: float, gini_poor: float) -> float:
    """Combine headcount, gap ratio and Gini-of-the-poor into the composite index.

    Diagnostic cross-check only; the estimators module does not build on it.
    """
    if partition.q == 0:
        raise NoPoorObservations("composite index undefined with no poor observations")
    q = partition.q
    return partition.headcount * gap_ratio + (q / (q + 1.0)) * (1.0 - gap_ratio) * gini_poor
