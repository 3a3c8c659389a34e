"""Empirical likelihood ratios and confidence intervals for both indices.

The estimating function for a candidate index value is affine in the
candidate, so each sample is profiled once (the data-dependent part is
precomputed) and the ratio is then cheap to evaluate along the interval
inversion.  The ratio is exactly zero at the matching plug-in estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import IncomeSample, check_poverty_line
from .errors import DegenerateInterval, Infeasible, NoPoorObservations, NonConvergence
from .intervals import ConfidenceInterval, invert_chi2_boundary, truncate_unit

_DEGENERATE_SPREAD = 1e-12


@dataclass(frozen=True)
class EstimatingValues:
    """Per-observation estimating values g_i; feasible iff 0 is inside their hull."""

    values: np.ndarray
    m: int = field(init=False)
    vmin: float = field(init=False)
    vmax: float = field(init=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("estimating values must be a 1-D array with m >= 2")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "m", int(arr.size))
        object.__setattr__(self, "vmin", float(arr.min()))
        object.__setattr__(self, "vmax", float(arr.max()))

    @property
    def feasible(self) -> bool:
        return self.vmin < 0.0 < self.vmax

    @property
    def all_zero(self) -> bool:
        return self.vmin == 0.0 and self.vmax == 0.0


@dataclass(frozen=True)
class ELSolution:
    lam: float
    log_ratio: float
    weights: np.ndarray
    converged: bool
    iterations: int


def solve_lambda(values: EstimatingValues) -> ELSolution:
    """Solve the dual equation (1/m) sum g_i/(1 + lam g_i) = 0.

    The root is unique on the open domain keeping all weights positive because
    the dual is strictly decreasing there.  All-zero values trivially satisfy
    the constraint (uniform weights, ratio zero); values whose hull excludes
    zero raise :class:`Infeasible`.
    """
    g = values.values
    if values.all_zero:
        return ELSolution(0.0, 0.0, np.full(values.m, 1.0 / values.m), True, 0)
    if not values.feasible:
        raise Infeasible(
            f"zero outside the hull of the estimating values [{values.vmin:g}, {values.vmax:g}]"
        )
    lam, log_ratio, iters, status = _kernels.el_solve(g)
    if status != 0:
        raise NonConvergence(f"dual solver did not converge in {iters} iterations")
    weights = 1.0 / (values.m * (1.0 + lam * g))
    return ELSolution(lam, max(0.0, log_ratio), weights, True, iters)


def _ratio_of(g: np.ndarray) -> float:
    """-2 log likelihood ratio for raw values; +inf when infeasible."""
    gmin = float(g.min())
    gmax = float(g.max())
    if gmin == 0.0 and gmax == 0.0:
        return 0.0
    if not gmin < 0.0 < gmax:
        return math.inf
    lam, log_ratio, iters, status = _kernels.el_solve(g)
    if status != 0:
        raise NonConvergence(f"dual solver did not converge in {iters} iterations")
    return max(0.0, log_ratio)


# ---------------------------------------------------------------------------
# Estimating functions.  Per observation:
#
#   sen:  ( 2 (z - X_i)(F_n(z) - F_n(X_i)) - z S ) * I(X_i <= z)
#   sst:    2 (z - X_i)(1 - F_n(X_i)) I(X_i <= z) - z S_h
#
# For the sst function the indicator multiplies only the data term; applying
# it to the whole bracket would break both the population mean-zero property
# and the exact zero of the ratio at the plug-in estimate.


class _ELProfile:
    """Precomputed per-sample pieces; ratio(candidate) is then O(n)."""

    __slots__ = ("base", "slope", "n", "q", "z", "window", "degenerate", "center")

    def __init__(self, sample: IncomeSample, z: float, index: str):
        z = check_poverty_line(z)
        n = sample.n
        q = sample.poor_count(z)
        if q < 2:
            raise NoPoorObservations(
                f"likelihood interval needs at least 2 poor observations, got q={q}"
            )
        x = sample.values
        poor = x[:q]
        upper = np.searchsorted(x, poor, side="right")
        base = np.zeros(n)
        slope = np.zeros(n)
        if index == "sen":
            base[:q] = 2.0 * (z - poor) * (q - upper) / n
            slope[:q] = z
            data_part = base[:q]
            # exact root of the mean estimating equation; equals the plug-in
            # estimate whenever the poor incomes are distinct
            center = float(data_part.sum()) / (q * z)
        elif index == "sst":
            base[:q] = 2.0 * (z - poor) * (n - upper) / n
            slope[:] = z
            data_part = base
            center = float(data_part.sum()) / (n * z)
        else:
            raise ValueError(f"unknown index kind {index!r}")
        lo = float(data_part.min()) / z
        hi = float(data_part.max()) / z
        self.base = base
        self.slope = slope
        self.n = n
        self.q = q
        self.z = z
        self.window = (lo, hi)
        self.degenerate = (hi - lo) <= _DEGENERATE_SPREAD * max(1.0, abs(hi))
        self.center = center

    def values(self, candidate: float) -> np.ndarray:
        return self.base - candidate * self.slope

    def ratio(self, candidate: float) -> float:
        lo, hi = self.window
        if not lo < candidate < hi:
            return math.inf
        return _ratio_of(self.values(candidate))


def sen_el_values(sample: IncomeSample, z: float, candidate: float) -> EstimatingValues:
    """Estimating values for the Sen index at a hypothesized value."""
    return EstimatingValues(_ELProfile(sample, z, "sen").values(candidate))


def sst_el_values(sample: IncomeSample, z: float, candidate: float) -> EstimatingValues:
    """Estimating values for the SST index at a hypothesized value."""
    return EstimatingValues(_ELProfile(sample, z, "sst").values(candidate))


def el_log_ratio(sample: IncomeSample, z: float, index: str, candidate: float) -> float:
    """-2 log empirical likelihood ratio at a candidate index value (inf if infeasible)."""
    prof = _ELProfile(sample, z, index)
    if prof.degenerate:
        # only one attainable value; the ratio is zero there and +inf elsewhere
        return 0.0 if candidate == prof.center else math.inf
    return prof.ratio(candidate)


def el_confidence_interval(
    sample: IncomeSample, z: float, index: str, alpha: float = 0.05
) -> ConfidenceInterval:
    """Chi-square(1) inversion of the empirical likelihood ratio, clipped to [0, 1]."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    prof = _ELProfile(sample, z, index)
    if prof.degenerate:
        raise DegenerateInterval(
            "estimating values admit a single index value (all poor incomes identical)"
        )
    lower, upper, diag = invert_chi2_boundary(prof.ratio, prof.center, alpha)
    lower, upper = truncate_unit(lower, upper)
    return ConfidenceInterval(
        lower=lower,
        upper=upper,
        level=1.0 - alpha,
        method="el",
        estimate=prof.center,
        diagnostics=diag,
    )
