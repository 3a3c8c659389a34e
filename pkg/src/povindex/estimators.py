"""Point estimators for the two poverty indices and their asymptotic variances.

Three estimator families per index: the plug-in form, the half-rank-corrected
("davidson") form, and the pair-kernel U-statistic form.  Plug-in and davidson
forms are the literal sorted-rank sums; the U-statistic closed forms use
tie-aware upper ranks so they equal the pair-kernel averages exactly, ties
included, and the O(n^2) pair enumerations are kept as independent oracles.

Conventions: poor means income <= z; a sample with q = 0 yields a flagged zero
estimate rather than an error (interval procedures are stricter and refuse).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import IncomeSample, check_poverty_line
from .errors import NoPoorObservations
from .intervals import ConfidenceInterval

_EPS_ROUND = 1e-12


@dataclass(frozen=True)
class IndexEstimate:
    index: str  # "sen" | "sst"
    method: str  # "plugin" | "davidson" | "ustat"
    value: float
    n: int
    q: int
    z: float
    no_poor: bool = False


@dataclass(frozen=True)
class UStatComponents:
    """Pair-kernel averages: u1 estimates the truncated-gap mean, u2 the poor probability."""

    u1: float
    u2: float
    pair_count: int


@dataclass(frozen=True)
class AsymptoticVariance:
    sigma_sq: float
    sigma1_sq: float | None = None
    sigma2_sq: float | None = None
    sigma12: float | None = None


def _poor_slice(sample: IncomeSample, z: float) -> tuple[int, np.ndarray]:
    q = sample.poor_count(z)
    return q, sample.values[:q]


def _upper_ranks(sample: IncomeSample, poor: np.ndarray) -> np.ndarray:
    # #{j : X_j <= X_(i)} per poor observation; equals i for distinct values
    return np.searchsorted(sample.values, poor, side="right")


# ---------------------------------------------------------------------------
# Sen index


def sen_plugin(sample: IncomeSample, z: float) -> IndexEstimate:
    """Plug-in estimator 2/(nqz) * sum (z - X_(i)) (q - i), literal sorted ranks."""
    z = check_poverty_line(z)
    q, poor = _poor_slice(sample, z)
    n = sample.n
    if q == 0:
        return IndexEstimate("sen", "plugin", 0.0, n, 0, z, no_poor=True)
    ranks = np.arange(1, q + 1)
    value = 2.0 * float(np.sum((z - poor) * (q - ranks))) / (n * q * z)
    return IndexEstimate("sen", "plugin", value, n, q, z)


def sen_davidson(sample: IncomeSample, z: float) -> IndexEstimate:
    """Half-rank-corrected estimator 2/(nqz) * sum (z - X_(i)) (q - i + 1/2)."""
    z = check_poverty_line(z)
    q, poor = _poor_slice(sample, z)
    n = sample.n
    if q == 0:
        return IndexEstimate("sen", "davidson", 0.0, n, 0, z, no_poor=True)
    ranks = np.arange(1, q + 1)
    value = 2.0 * float(np.sum((z - poor) * (q - ranks + 0.5))) / (n * q * z)
    return IndexEstimate("sen", "davidson", value, n, q, z)


def _sen_ustat_closed(sample: IncomeSample, z: float) -> tuple[float, float]:
    """Exact pair-kernel averages (u1, u2) via sorted closed forms, O(n log n)."""
    q, poor = _poor_slice(sample, z)
    n = sample.n
    u2 = q / n
    if q == 0:
        return 0.0, u2
    upper = _upper_ranks(sample, poor)
    u1 = float(np.sum((z - poor) * (q - upper))) / (n * (n - 1))
    return u1, u2


def sen_ustat_kernel(sample: IncomeSample, z: float) -> UStatComponents:
    """Pair-kernel averages by O(n^2) enumeration (oracle path)."""
    z = check_poverty_line(z)
    u1, u2 = _kernels.sen_pair_stats(sample.values, z)
    return UStatComponents(u1=u1, u2=u2, pair_count=sample.n * (sample.n - 1) // 2)


def sen_ustat(sample: IncomeSample, z: float) -> IndexEstimate:
    """U-statistic estimator (2/z) u1/u2; flagged zero when no observation is poor."""
    z = check_poverty_line(z)
    u1, u2 = _sen_ustat_closed(sample, z)
    n = sample.n
    q = sample.poor_count(z)
    if u2 == 0.0:
        return IndexEstimate("sen", "ustat", 0.0, n, 0, z, no_poor=True)
    value = (2.0 / z) * u1 / u2
    return IndexEstimate("sen", "ustat", value, n, q, z)


# ---------------------------------------------------------------------------
# SST index


def sst_plugin(sample: IncomeSample, z: float) -> IndexEstimate:
    """Plug-in estimator 2/(z n^2) * sum (n - i) (z - X_(i)), literal sorted ranks."""
    z = check_poverty_line(z)
    q, poor = _poor_slice(sample, z)
    n = sample.n
    if q == 0:
        return IndexEstimate("sst", "plugin", 0.0, n, 0, z)
    ranks = np.arange(1, q + 1)
    value = 2.0 * float(np.sum((n - ranks) * (z - poor))) / (z * n * n)
    return IndexEstimate("sst", "plugin", value, n, q, z)


def sst_davidson(sample: IncomeSample, z: float) -> IndexEstimate:
    """Half-rank-corrected estimator 2/(n^2 z) * sum (n - i + 0.5) (z - X_(i))."""
    z = check_poverty_line(z)
    q, poor = _poor_slice(sample, z)
    n = sample.n
    if q == 0:
        return IndexEstimate("sst", "davidson", 0.0, n, 0, z)
    ranks = np.arange(1, q + 1)
    value = 2.0 * float(np.sum((n - ranks + 0.5) * (z - poor))) / (z * n * n)
    return IndexEstimate("sst", "davidson", value, n, q, z)


def _sst_ustat_value(sample: IncomeSample, z: float) -> float:
    # positional ranks are exact here: each unordered pair is counted once with
    # its smaller sorted position as the minimum, and ties share the same value
    q, poor = _poor_slice(sample, z)
    n = sample.n
    if q == 0:
        return 0.0
    ranks = np.arange(1, q + 1)
    return 2.0 * float(np.sum((n - ranks) * (z - poor))) / (n * (n - 1) * z)


def sst_ustat_kernel(sample: IncomeSample, z: float) -> float:
    """Mean of the min-based pair kernel by O(n^2) enumeration (oracle path)."""
    z = check_poverty_line(z)
    return _kernels.sst_pair_mean(sample.values, z)


def sst_ustat(sample: IncomeSample, z: float) -> IndexEstimate:
    """Unbiased U-statistic estimator 2/(n(n-1)z) * sum (n - i) (z - X_(i))."""
    z = check_poverty_line(z)
    q = sample.poor_count(z)
    value = _sst_ustat_value(sample, z)
    return IndexEstimate("sst", "ustat", value, sample.n, q, z)


# ---------------------------------------------------------------------------
# Asymptotic variances (plug-in evaluation of the Gaussian-limit expressions)


def _cumulative_income_below(sample: IncomeSample) -> np.ndarray:
    # (1/n) sum_{X_j <= X_i} X_j per observation, closed upper limit (includes i)
    upper = np.searchsorted(sample.values, sample.values, side="right")
    csum = np.cumsum(sample.values)
    return csum[upper - 1] / sample.n


def sen_asymptotic_variance(sample: IncomeSample, z: float) -> AsymptoticVariance:
    """Delta-method variance of the Sen U-statistic estimator, all parts empirical.

    sigma^2 = (4/z^2) [s1/F^2 + u1^2 s2/F^4 - 2 u1 s12/F^3] with F the empirical
    poor share, s1 the sample variance of the first-order projection values,
    s2 = F(1-F)/4 and s12 the empirical cross term.  Truncated at zero.
    """
    z = check_poverty_line(z)
    n = sample.n
    q = sample.poor_count(z)
    if q == 0:
        raise NoPoorObservations("variance of the Sen estimator undefined with q = 0")
    x = sample.values
    fn_x = np.searchsorted(x, x, side="right") / n
    fn_z = q / n
    h1 = x * (fn_x - fn_z) - _cumulative_income_below(sample)
    sigma1_sq = float(np.var(h1, ddof=1))
    sigma2_sq = fn_z * (1.0 - fn_z) / 4.0
    sigma12 = float(np.sum(h1[:q])) / (2.0 * n)
    u1, _ = _sen_ustat_closed(sample, z)
    f = fn_z
    sigma_sq = (4.0 / z**2) * (
        sigma1_sq / f**2 + (u1**2) * sigma2_sq / f**4 - 2.0 * u1 * sigma12 / f**3
    )
    return AsymptoticVariance(
        sigma_sq=max(0.0, sigma_sq),
        sigma1_sq=sigma1_sq,
        sigma2_sq=sigma2_sq,
        sigma12=sigma12,
    )


def sst_asymptotic_variance(sample: IncomeSample, z: float) -> AsymptoticVariance:
    """Four times the sample variance of the empirical first-order projection."""
    z = check_poverty_line(z)
    n = sample.n
    q = sample.poor_count(z)
    x = sample.values
    fn_x = np.searchsorted(x, x, side="right") / n
    part = _cumulative_income_below(sample)
    poor_mass = float(np.sum(x[:q])) / n  # (1/n) sum_{X_j <= z} X_j
    proj = np.where(
        x > z,
        q / n - poor_mass / z,
        1.0 - (x * (1.0 - fn_x) + part) / z,
    )
    sigma2_sst = float(np.var(proj, ddof=1))
    return AsymptoticVariance(sigma_sq=4.0 * sigma2_sst, sigma2_sq=sigma2_sst)


def normal_ci(
    estimate: IndexEstimate, variance: AsymptoticVariance, alpha: float
) -> ConfidenceInterval:
    """Wald interval estimate +/- z_{alpha/2} sqrt(sigma^2/n), clipped to [0, 1]."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if variance.sigma_sq < 0.0:
        raise ValueError("variance must be nonnegative")
    half = _kernels.normal_quantile(1.0 - alpha / 2.0) * np.sqrt(
        variance.sigma_sq / estimate.n
    )
    return ConfidenceInterval(
        lower=max(0.0, estimate.value - half),
        upper=min(1.0, estimate.value + half),
        level=1.0 - alpha,
        method="normal",
        estimate=estimate.value,
    )


ESTIMATORS = {
    ("sen", "plugin"): sen_plugin,
    ("sen", "davidson"): sen_davidson,
    ("sen", "ustat"): sen_ustat,
    ("sst", "plugin"): sst_plugin,
    ("sst", "davidson"): sst_davidson,
    ("sst", "ustat"): sst_ustat,
}
