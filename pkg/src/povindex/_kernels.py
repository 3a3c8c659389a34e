"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

Covers the pieces that dominate Monte Carlo runtime: the self-normalized
dual-equation solver used by every likelihood-ratio evaluation, the O(n^2)
pair-kernel oracles, and the inverse normal CDF used by the samplers.  The
active backend is chosen once at import from POVINDEX_BACKEND (see
``povindex._backend``); ``benchmarks/bench_backends.py`` times both.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _special

from ._backend import ACTIVE_BACKEND, USE_NUMBA

__all__ = [
    "ACTIVE_BACKEND",
    "normal_quantile",
    "ndtri_array",
    "chi2_quantile_1df",
    "el_solve",
    "sen_pair_stats",
    "sst_pair_mean",
    "sen_row_sums_pairs",
    "sst_row_sums_pairs",
    "IMPLEMENTATIONS",
]

# ---------------------------------------------------------------------------
# Inverse standard normal CDF.
#
# Acklam's rational approximation followed by one Halley refinement step,
# giving ~1e-15 relative accuracy (well inside the 1e-9 requirement).  Written
# as a scalar so numba can compile the identical function.

_A0, _A1, _A2, _A3, _A4, _A5 = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_B0, _B1, _B2, _B3, _B4 = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_C0, _C1, _C2, _C3, _C4, _C5 = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_D0, _D1, _D2, _D3 = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT_2 = math.sqrt(2.0)


def _ndtri_scalar(p: float) -> float:
    if p <= 0.0:
        return -math.inf if p == 0.0 else math.nan
    if p >= 1.0:
        return math.inf if p == 1.0 else math.nan
    if p < _P_LOW:
        t = math.sqrt(-2.0 * math.log(p))
        x = ((((( _C0 * t + _C1) * t + _C2) * t + _C3) * t + _C4) * t + _C5) / \
            ((((_D0 * t + _D1) * t + _D2) * t + _D3) * t + 1.0)
    elif p <= 1.0 - _P_LOW:
        r = p - 0.5
        t = r * r
        x = ((((( _A0 * t + _A1) * t + _A2) * t + _A3) * t + _A4) * t + _A5) * r / \
            ((((( _B0 * t + _B1) * t + _B2) * t + _B3) * t + _B4) * t + 1.0)
    else:
        t = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -((((( _C0 * t + _C1) * t + _C2) * t + _C3) * t + _C4) * t + _C5) / \
            ((((_D0 * t + _D1) * t + _D2) * t + _D3) * t + 1.0)
    # Halley refinement against the exact CDF
    e = 0.5 * math.erfc(-x / _SQRT_2) - p
    u = e * _SQRT_2PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def _ndtri_array_np(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    x = np.empty_like(p)
    low = p < _P_LOW
    high = p > 1.0 - _P_LOW
    mid = ~(low | high)

    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.sqrt(-2.0 * np.log(p[low]))
        x[low] = ((((( _C0 * t + _C1) * t + _C2) * t + _C3) * t + _C4) * t + _C5) / \
            ((((_D0 * t + _D1) * t + _D2) * t + _D3) * t + 1.0)

        r = p[mid] - 0.5
        t = r * r
        x[mid] = ((((( _A0 * t + _A1) * t + _A2) * t + _A3) * t + _A4) * t + _A5) * r / \
            ((((( _B0 * t + _B1) * t + _B2) * t + _B3) * t + _B4) * t + 1.0)

        t = np.sqrt(-2.0 * np.log(1.0 - p[high]))
        x[high] = -((((( _C0 * t + _C1) * t + _C2) * t + _C3) * t + _C4) * t + _C5) / \
            ((((_D0 * t + _D1) * t + _D2) * t + _D3) * t + 1.0)

        e = 0.5 * _special.erfc(-x / _SQRT_2) - p
        u = e * _SQRT_2PI * np.exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)

    x[p == 0.0] = -np.inf
    x[p == 1.0] = np.inf
    x[(p < 0.0) | (p > 1.0)] = np.nan
    return x


# ---------------------------------------------------------------------------
# Dual-equation solver.
#
# Given estimating values g with min(g) < 0 < max(g), find the multiplier lam
# solving (1/m) sum g_i / (1 + lam g_i) = 0 on the domain where all weights
# stay positive, and return 2 * sum log(1 + lam g_i).  Safeguarded Newton with
# bisection fallback; the dual is solved on max-abs-normalized values so the
# |dual| <= tol stopping rule is scale-free.  Callers guarantee feasibility.

_EL_TOL = 1e-10
_EL_MAX_ITER = 200


def _el_solve_np(g: np.ndarray, tol: float = _EL_TOL, max_iter: int = _EL_MAX_ITER):
    gs = np.asarray(g, dtype=np.float64)
    scale = float(np.max(np.abs(gs)))
    gs = gs / scale
    gmax = float(gs.max())
    gmin = float(gs.min())
    lo = -1.0 / gmax
    hi = -1.0 / gmin
    a = lo + 1e-10 * (1.0 + abs(lo))
    b = hi - 1e-10 * (1.0 + abs(hi))

    def dual(lam: float) -> tuple[float, float]:
        w = 1.0 + lam * gs
        t = gs / w
        return float(np.mean(t)), float(np.mean(t * t))

    da, _ = dual(a)
    k = 0
    while da <= 0.0 and k < 64:  # pull endpoint toward the pole where dual -> +inf
        a = lo + 0.125 * (a - lo)
        da, _ = dual(a)
        k += 1
    db, _ = dual(b)
    k = 0
    while db >= 0.0 and k < 64:
        b = hi - 0.125 * (hi - b)
        db, _ = dual(b)
        k += 1

    lam = 0.0 if a < 0.0 < b else 0.5 * (a + b)
    status = 1
    iters = 0
    for iters in range(1, max_iter + 1):
        d, dsq = dual(lam)
        if abs(d) <= tol:
            status = 0
            break
        if d > 0.0:
            a = lam
        else:
            b = lam
        if (b - a) <= 5e-16 * (abs(a) + abs(b) + 1.0):
            lam = 0.5 * (a + b)
            d, _ = dual(lam)
            status = 0 if abs(d) <= tol else 1
            break
        lam_new = lam + d / dsq  # Newton step; dual' = -mean((g/(1+lam g))^2)
        if not (a < lam_new < b):
            lam_new = 0.5 * (a + b)
        lam = lam_new
    log_ratio = 2.0 * float(np.sum(np.log1p(lam * gs)))
    return lam / scale, log_ratio, iters, status


# ---------------------------------------------------------------------------
# Pair-kernel oracles (naive O(n^2) enumeration; kept as the independent check
# for the closed-form estimators, and hot inside the equivalence test suites).


def _sen_pair_stats_np(x: np.ndarray, z: float) -> tuple[float, float]:
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    xi = x[:, None]
    xj = x[None, :]
    poor_i = xi <= z
    poor_j = xj <= z
    psi1 = 0.5 * (np.where((xi < xj) & poor_j, z - xi, 0.0)
                  + np.where((xj < xi) & poor_i, z - xj, 0.0))
    psi2 = 0.5 * (poor_i.astype(np.float64) + poor_j.astype(np.float64))
    iu = np.triu_indices(n, k=1)
    npairs = 0.5 * n * (n - 1)
    return float(psi1[iu].sum()) / npairs, float(psi2[iu].sum()) / npairs


def _sst_pair_mean_np(x: np.ndarray, z: float) -> float:
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    mn = np.minimum(x[:, None], x[None, :])
    psi3 = np.where(mn <= z, 1.0 - mn / z, 0.0)
    iu = np.triu_indices(n, k=1)
    npairs = 0.5 * n * (n - 1)
    return float(psi3[iu].sum()) / npairs


def _sen_row_sums_pairs_np(x: np.ndarray, z: float) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    xi = x[:, None]
    xj = x[None, :]
    poor_i = xi <= z
    poor_j = xj <= z
    psi1 = 0.5 * (np.where((xi < xj) & poor_j, z - xi, 0.0)
                  + np.where((xj < xi) & poor_i, z - xj, 0.0))
    psi2 = 0.5 * (poor_i.astype(np.float64) + poor_j.astype(np.float64))
    np.fill_diagonal(psi2, 0.0)  # psi1 diagonal is already zero (strict inequalities)
    return psi1.sum(axis=1), psi2.sum(axis=1)


def _sst_row_sums_pairs_np(x: np.ndarray, z: float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    mn = np.minimum(x[:, None], x[None, :])
    psi3 = np.where(mn <= z, 1.0 - mn / z, 0.0)
    np.fill_diagonal(psi3, 0.0)
    return psi3.sum(axis=1)


# ---------------------------------------------------------------------------
# numba backend

if USE_NUMBA:
    from numba import njit

    _ndtri_scalar_nb = njit(cache=True)(_ndtri_scalar)

    @njit(cache=True)
    def _ndtri_array_nb(p):
        out = np.empty(p.size, dtype=np.float64)
        for i in range(p.size):
            out[i] = _ndtri_scalar_nb(p[i])
        return out

    @njit(cache=True)
    def _el_solve_nb(g, tol, max_iter):
        m = g.shape[0]
        scale = 0.0
        for i in range(m):
            av = abs(g[i])
            if av > scale:
                scale = av
        gs = g / scale
        gmax = gs[0]
        gmin = gs[0]
        for i in range(1, m):
            if gs[i] > gmax:
                gmax = gs[i]
            if gs[i] < gmin:
                gmin = gs[i]
        lo = -1.0 / gmax
        hi = -1.0 / gmin
        a = lo + 1e-10 * (1.0 + abs(lo))
        b = hi - 1e-10 * (1.0 + abs(hi))

        def dual(lam):
            s = 0.0
            s2 = 0.0
            for i in range(m):
                t = gs[i] / (1.0 + lam * gs[i])
                s += t
                s2 += t * t
            return s / m, s2 / m

        da, _ = dual(a)
        k = 0
        while da <= 0.0 and k < 64:
            a = lo + 0.125 * (a - lo)
            da, _ = dual(a)
            k += 1
        db, _ = dual(b)
        k = 0
        while db >= 0.0 and k < 64:
            b = hi - 0.125 * (hi - b)
            db, _ = dual(b)
            k += 1

        lam = 0.0 if a < 0.0 < b else 0.5 * (a + b)
        status = 1
        iters = 0
        for it in range(1, max_iter + 1):
            iters = it
            d, dsq = dual(lam)
            if abs(d) <= tol:
                status = 0
                break
            if d > 0.0:
                a = lam
            else:
                b = lam
            if (b - a) <= 5e-16 * (abs(a) + abs(b) + 1.0):
                lam = 0.5 * (a + b)
                d, _ = dual(lam)
                status = 0 if abs(d) <= tol else 1
                break
            lam_new = lam + d / dsq
            if not (a < lam_new < b):
                lam_new = 0.5 * (a + b)
            lam = lam_new
        log_ratio = 0.0
        for i in range(m):
            log_ratio += math.log1p(lam * gs[i])
        return lam / scale, 2.0 * log_ratio, iters, status

    @njit(cache=True)
    def _sen_pair_stats_nb(x, z):
        n = x.shape[0]
        s1 = 0.0
        s2 = 0.0
        for i in range(n):
            xi = x[i]
            for j in range(i):
                xj = x[j]
                if xi < xj and xj <= z:
                    s1 += 0.5 * (z - xi)
                elif xj < xi and xi <= z:
                    s1 += 0.5 * (z - xj)
                c = 0.0
                if xi <= z:
                    c += 0.5
                if xj <= z:
                    c += 0.5
                s2 += c
        npairs = 0.5 * n * (n - 1)
        return s1 / npairs, s2 / npairs

    @njit(cache=True)
    def _sst_pair_mean_nb(x, z):
        n = x.shape[0]
        s = 0.0
        for i in range(n):
            for j in range(i):
                mn = x[i] if x[i] < x[j] else x[j]
                if mn <= z:
                    s += 1.0 - mn / z
        npairs = 0.5 * n * (n - 1)
        return s / npairs

    @njit(cache=True)
    def _sen_row_sums_pairs_nb(x, z):
        n = x.shape[0]
        r1 = np.zeros(n, dtype=np.float64)
        r2 = np.zeros(n, dtype=np.float64)
        for i in range(n):
            xi = x[i]
            for j in range(n):
                if j == i:
                    continue
                xj = x[j]
                if xi < xj and xj <= z:
                    r1[i] += 0.5 * (z - xi)
                elif xj < xi and xi <= z:
                    r1[i] += 0.5 * (z - xj)
                c = 0.0
                if xi <= z:
                    c += 0.5
                if xj <= z:
                    c += 0.5
                r2[i] += c
        return r1, r2

    @njit(cache=True)
    def _sst_row_sums_pairs_nb(x, z):
        n = x.shape[0]
        r3 = np.zeros(n, dtype=np.float64)
        for i in range(n):
            xi = x[i]
            for j in range(n):
                if j == i:
                    continue
                mn = xi if xi < x[j] else x[j]
                if mn <= z:
                    r3[i] += 1.0 - mn / z
        return r3

    def el_solve(g, tol: float = _EL_TOL, max_iter: int = _EL_MAX_ITER):
        return _el_solve_nb(np.ascontiguousarray(g, dtype=np.float64), tol, max_iter)

    def ndtri_array(p):
        p = np.ascontiguousarray(p, dtype=np.float64)
        return _ndtri_array_nb(p.ravel()).reshape(p.shape)

    def sen_pair_stats(x, z):
        return _sen_pair_stats_nb(np.ascontiguousarray(x, dtype=np.float64), float(z))

    def sst_pair_mean(x, z):
        return _sst_pair_mean_nb(np.ascontiguousarray(x, dtype=np.float64), float(z))

    def sen_row_sums_pairs(x, z):
        return _sen_row_sums_pairs_nb(np.ascontiguousarray(x, dtype=np.float64), float(z))

    def sst_row_sums_pairs(x, z):
        return _sst_row_sums_pairs_nb(np.ascontiguousarray(x, dtype=np.float64), float(z))

else:
    el_solve = _el_solve_np
    ndtri_array = _ndtri_array_np
    sen_pair_stats = _sen_pair_stats_np
    sst_pair_mean = _sst_pair_mean_np
    sen_row_sums_pairs = _sen_row_sums_pairs_np
    sst_row_sums_pairs = _sst_row_sums_pairs_np


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF for a scalar probability."""
    return _ndtri_scalar(float(p))


def chi2_quantile_1df(p: float) -> float:
    """Quantile of chi-square with one degree of freedom (square of a normal quantile)."""
    return normal_quantile(0.5 + 0.5 * float(p)) ** 2


# Both implementations, for the backend benchmark and parity tests.
IMPLEMENTATIONS: dict[str, dict] = {
    "numpy": {
        "el_solve": _el_solve_np,
        "ndtri_array": _ndtri_array_np,
        "sen_pair_stats": _sen_pair_stats_np,
        "sst_pair_mean": _sst_pair_mean_np,
        "sen_row_sums_pairs": _sen_row_sums_pairs_np,
        "sst_row_sums_pairs": _sst_row_sums_pairs_np,
    }
}
if USE_NUMBA:
    IMPLEMENTATIONS["numba"] = {
        "el_solve": el_solve,
        "ndtri_array": ndtri_array,
        "sen_pair_stats": sen_pair_stats,
        "sst_pair_mean": sst_pair_mean,
        "sen_row_sums_pairs": sen_row_sums_pairs,
        "sst_row_sums_pairs": sst_row_sums_pairs,
    }
