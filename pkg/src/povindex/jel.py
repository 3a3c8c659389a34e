"""Jackknife empirical likelihood for the U-statistic estimators.

Pseudo-values are n*S_n - (n-1)*S_{n-1,k}; leave-one-out statistics come from
per-observation row sums of the pair kernel (full pair total minus a row),
O(n log n) per sample via sorted prefix sums instead of O(n^3) recomputation.
The mean pseudo-value recovers the full-sample statistic exactly.

For the Sen index the pair kernel itself depends on the hypothesized value
(2*psi1 - z*S*psi2), so pseudo-values are rebuilt per candidate from two
candidate-free row-sum arrays; for the SST index the pseudo-values estimate
the index directly and are centered at the candidate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import IncomeSample, check_poverty_line
from .el import _ratio_of
from .errors import DegenerateInterval, NoPoorObservations
from .estimators import sen_ustat, sst_ustat
from .intervals import ConfidenceInterval, invert_chi2_boundary, truncate_unit

_DEGENERATE_SPREAD = 1e-12


@dataclass(frozen=True)
class PseudoValues:
    values: np.ndarray
    n: int
    mean: float


def _require_min_n(sample: IncomeSample) -> None:
    if sample.n < 3:
        raise ValueError("jackknife pseudo-values need n >= 3")


def _sen_row_sums(sample: IncomeSample, z: float):
    """Row sums of the two Sen pair kernels and their pair totals (tie-aware)."""
    x = sample.values
    n = sample.n
    q = sample.poor_count(z)
    poor = x[:q]
    gaps = z - poor
    upper = np.searchsorted(x, poor, side="right")
    lower = np.searchsorted(x, poor, side="left")
    prefix = np.concatenate(([0.0], np.cumsum(gaps)))
    r1 = np.zeros(n)
    r1[:q] = 0.5 * (gaps * (q - upper) + prefix[lower])
    is_poor = np.zeros(n)
    is_poor[:q] = 1.0
    r2 = 0.5 * ((n - 1) * is_poor + (q - is_poor))
    return r1, r2, 0.5 * float(r1.sum()), 0.5 * float(r2.sum())


def _sst_row_sums(sample: IncomeSample, z: float):
    """Row sums of the min-based pair kernel and their pair total."""
    x = sample.values
    n = sample.n
    q = sample.poor_count(z)
    w = 1.0 - x[:q] / z
    prefix = np.concatenate(([0.0], np.cumsum(w)))
    r3 = np.empty(n)
    positions = np.arange(1, q + 1)
    r3[:q] = (n - positions) * w + prefix[:q]
    r3[q:] = prefix[q]
    return r3, 0.5 * float(r3.sum())


def _pseudovalues_from_rows(rows: np.ndarray, total: float, n: int) -> np.ndarray:
    s_full = 2.0 * total / (n * (n - 1))
    s_loo = 2.0 * (total - rows) / ((n - 1) * (n - 2))
    return n * s_full - (n - 1) * s_loo


def sen_jel_pseudovalues(sample: IncomeSample, z: float, candidate: float) -> PseudoValues:
    """Pseudo-values of the Sen estimating U-statistic at a hypothesized value.

    Their mean equals 2*u1 - z*candidate*u2 exactly.
    """
    z = check_poverty_line(z)
    _require_min_n(sample)
    r1, r2, t1, t2 = _sen_row_sums(sample, z)
    rows = 2.0 * r1 - (z * candidate) * r2
    total = 2.0 * t1 - (z * candidate) * t2
    v = _pseudovalues_from_rows(rows, total, sample.n)
    return PseudoValues(values=v, n=sample.n, mean=float(v.mean()))


def sst_jel_pseudovalues(sample: IncomeSample, z: float) -> PseudoValues:
    """Pseudo-values of the SST U-statistic; their mean equals the estimate exactly."""
    z = check_poverty_line(z)
    _require_min_n(sample)
    r3, t3 = _sst_row_sums(sample, z)
    v = _pseudovalues_from_rows(r3, t3, sample.n)
    return PseudoValues(values=v, n=sample.n, mean=float(v.mean()))


class _JELProfile:
    """Precomputed row sums; pseudo-values per candidate are then O(n)."""

    __slots__ = ("index", "n", "z", "center", "_r1", "_r2", "_t1", "_t2", "_q_pseudo", "degenerate")

    def __init__(self, sample: IncomeSample, z: float, index: str):
        z = check_poverty_line(z)
        _require_min_n(sample)
        q = sample.poor_count(z)
        if q < 2:
            raise NoPoorObservations(
                f"likelihood interval needs at least 2 poor observations, got q={q}"
            )
        self.index = index
        self.n = sample.n
        self.z = z
        if index == "sen":
            self._r1, self._r2, self._t1, self._t2 = _sen_row_sums(sample, z)
            self._q_pseudo = None
            self.center = sen_ustat(sample, z).value
            probe = self.values(self.center)
        elif index == "sst":
            r3, t3 = _sst_row_sums(sample, z)
            self._q_pseudo = _pseudovalues_from_rows(r3, t3, self.n)
            self._r1 = self._r2 = None
            self._t1 = self._t2 = None
            self.center = sst_ustat(sample, z).value
            probe = self._q_pseudo
        else:
            raise ValueError(f"unknown index kind {index!r}")
        spread = float(probe.max() - probe.min())
        self.degenerate = spread <= _DEGENERATE_SPREAD * max(1.0, float(np.abs(probe).max()))

    def values(self, candidate: float) -> np.ndarray:
        if self.index == "sen":
            rows = 2.0 * self._r1 - (self.z * candidate) * self._r2
            total = 2.0 * self._t1 - (self.z * candidate) * self._t2
            return _pseudovalues_from_rows(rows, total, self.n)
        return self._q_pseudo - candidate

    def ratio(self, candidate: float) -> float:
        return _ratio_of(self.values(candidate))


def jel_log_ratio(sample: IncomeSample, z: float, index: str, candidate: float) -> float:
    """Jackknife empirical log-likelihood ratio at a candidate (inf if infeasible)."""
    prof = _JELProfile(sample, z, index)
    return prof.ratio(candidate)


def jel_confidence_interval(
    sample: IncomeSample, z: float, index: str, alpha: float = 0.05
) -> ConfidenceInterval:
    """Chi-square(1) inversion of the jackknife likelihood ratio, clipped to [0, 1]."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    prof = _JELProfile(sample, z, index)
    if prof.degenerate:
        raise DegenerateInterval(
            "pseudo-values admit a single index value (all poor incomes identical)"
        )
    lower, upper, diag = invert_chi2_boundary(prof.ratio, prof.center, alpha)
    lower, upper = truncate_unit(lower, upper)
    return ConfidenceInterval(
        lower=lower,
        upper=upper,
        level=1.0 - alpha,
        method="jel",
        estimate=prof.center,
        diagnostics=diag,
    )
