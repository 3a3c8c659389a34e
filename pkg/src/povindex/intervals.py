"""Confidence-interval containers and chi-square boundary inversion.

The EL and JEL intervals are level sets {theta : ratio(theta) <= chi2_1(1-a)}.
Endpoints are located by doubling bracket expansion outward from the point
estimate followed by bisection; infeasible candidates (ratio = +inf) count as
outside the set, so the search also resolves feasibility boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from ._kernels import chi2_quantile_1df
from .errors import DegenerateInterval

_S_TOL = 1e-7
_RATIO_TOL = 1e-4
_MAX_EXPANSIONS = 60


@dataclass(frozen=True)
class InversionDiagnostics:
    ratio_evaluations: int
    bracket_expansions: int
    infeasible_endpoints: bool
    lower_at_boundary: bool
    upper_at_boundary: bool


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    method: str  # "el" | "jel" | "normal"
    estimate: float
    diagnostics: InversionDiagnostics | None = None

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def invert_chi2_boundary(
    ratio: Callable[[float], float],
    center: float,
    alpha: float,
    *,
    s_tol: float = _S_TOL,
    ratio_tol: float = _RATIO_TOL,
    max_expansions: int = _MAX_EXPANSIONS,
) -> tuple[float, float, InversionDiagnostics]:
    """Find both boundary crossings of ratio(theta) = chi2_1(1 - alpha).

    ``center`` must be an interior point (ratio below the threshold there);
    each side expands with step max(0.25*|center|, 0.01) doubling up to
    ``max_expansions`` times, then bisects to ``s_tol``.  An endpoint whose
    final ratio is not within ``ratio_tol`` of the threshold sits on a
    feasibility boundary and is flagged.
    """
    threshold = chi2_quantile_1df(1.0 - alpha)
    evals = 0
    expansions = 0

    def eval_ratio(s: float) -> float:
        nonlocal evals
        evals += 1
        v = ratio(s)
        return math.inf if math.isnan(v) else v

    r0 = eval_ratio(center)
    if not r0 < threshold:
        raise DegenerateInterval(
            f"ratio at the point estimate is {r0:g}, not below the chi-square threshold"
        )

    step0 = max(0.25 * abs(center), 0.01)

    def one_side(direction: float) -> tuple[float, bool]:
        nonlocal expansions
        inner = center
        outer = None
        for k in range(max_expansions):
            cand = center + direction * step0 * (2.0 ** k)
            expansions += 1
            if eval_ratio(cand) >= threshold:
                outer = cand
                break
            inner = cand
        if outer is None:
            # never crossed: report the furthest interior point, flagged
            return inner, True
        a, b = inner, outer
        while abs(b - a) > s_tol:
            mid = 0.5 * (a + b)
            if eval_ratio(mid) >= threshold:
                b = mid
            else:
                a = mid
        endpoint = 0.5 * (a + b)
        v_end = eval_ratio(endpoint)
        if math.isinf(v_end):
            return a, True
        return endpoint, abs(v_end - threshold) > ratio_tol

    lower, lflag = one_side(-1.0)
    upper, uflag = one_side(+1.0)
    diag = InversionDiagnostics(
        ratio_evaluations=evals,
        bracket_expansions=expansions,
        infeasible_endpoints=lflag or uflag,
        lower_at_boundary=lflag,
        upper_at_boundary=uflag,
    )
    return lower, upper, diag


def truncate_unit(lower: float, upper: float) -> tuple[float, float]:
    """Clip an interval to [0, 1], the range of both indices."""
    return max(0.0, lower), min(1.0, upper)
