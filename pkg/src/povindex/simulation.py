"""Monte Carlo grid harness for estimator quality and interval coverage.

Each grid cell is a (distribution, n) pair; replication r of cell c draws its
sample from an independent substream keyed by (seed, c, r), so runs are
reproducible, cells never share randomness, and all requested methods see the
same samples within a cell.  POVINDEX_THREADS > 1 runs cells in a process
pool; reports are assembled in cell order either way.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .core import check_poverty_line
from .distributions import DistributionSpec, dist_label, sample, true_index
from .el import el_confidence_interval
from .errors import DegenerateInterval, NoPoorObservations
from .estimators import (
    ESTIMATORS,
    normal_ci,
    sen_asymptotic_variance,
    sen_davidson,
    sst_asymptotic_variance,
    sst_davidson,
)
from .jel import jel_confidence_interval

VALID_ESTIMATOR_METHODS = tuple(f"{i}:{m}" for i in ("sen", "sst") for m in ("ustat", "plugin", "davidson"))
VALID_CI_METHODS = tuple(f"{i}:{m}" for i in ("sen", "sst") for m in ("el", "jel", "normal"))


@dataclass(frozen=True)
class MonteCarloConfig:
    reps: int
    seed: int
    n_grid: tuple[int, ...]
    z: float
    alpha: float = 0.05
    estimators: tuple[str, ...] = ()
    intervals: tuple[str, ...] = ()

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if not self.n_grid or any(n < 2 for n in self.n_grid):
            raise ValueError("n_grid must contain sizes >= 2")
        check_poverty_line(self.z)
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        for m in self.estimators:
            if m not in VALID_ESTIMATOR_METHODS:
                raise ValueError(f"unknown estimator method {m!r}")
        for m in self.intervals:
            if m not in VALID_CI_METHODS:
                raise ValueError(f"unknown interval method {m!r}")


@dataclass(frozen=True)
class SimulationCellReport:
    dist: str
    params: str
    n: int
    index: str
    method: str
    kind: str  # "estimate" | "ci"
    bias: float | None
    mse: float | None
    coverage: float | None
    avg_length: float | None
    reps_used: int
    failures: int
    mc_se: float
    truth: float


def _cell_rng(seed: int, cell_index: int, rep: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(cell_index, rep))
    return np.random.default_rng(ss)


def _split_label(dist: DistributionSpec) -> tuple[str, str]:
    label = dist_label(dist)
    family, _, params = label.partition(" ")
    return family, params


def _normal_interval(s, z, index, alpha):
    if index == "sen":
        est = sen_davidson(s, z)
        var = sen_asymptotic_variance(s, z)
    else:
        est = sst_davidson(s, z)
        var = sst_asymptotic_variance(s, z)
    return normal_ci(est, var, alpha)


def _interval_for(method: str, s, z: float, alpha: float):
    index, _, kind = method.partition(":")
    if kind == "el":
        return el_confidence_interval(s, z, index, alpha)
    if kind == "jel":
        return jel_confidence_interval(s, z, index, alpha)
    return _normal_interval(s, z, index, alpha)


def _estimator_cell(args) -> list[SimulationCellReport]:
    config, dist, n, cell_index = args
    family, params = _split_label(dist)
    truths = {idx: true_index(dist, config.z, idx) for idx in {m.split(":")[0] for m in config.estimators}}
    estimates = {m: np.empty(config.reps) for m in config.estimators}
    for r in range(config.reps):
        rng = _cell_rng(config.seed, cell_index, r)
        s = sample(dist, n, rng)
        for m in config.estimators:
            index, _, kind = m.partition(":")
            estimates[m][r] = ESTIMATORS[(index, kind)](s, config.z).value
    reports = []
    for m in config.estimators:
        index = m.split(":")[0]
        e = estimates[m]
        truth = truths[index]
        bias = float(e.mean()) - truth
        mse = float(np.mean((e - truth) ** 2))
        mc_se = float(e.std(ddof=1)) / np.sqrt(config.reps) if config.reps > 1 else 0.0
        reports.append(SimulationCellReport(
            dist=family, params=params, n=n, index=index, method=m.split(":")[1],
            kind="estimate", bias=bias, mse=mse, coverage=None, avg_length=None,
            reps_used=config.reps, failures=0, mc_se=mc_se, truth=truth,
        ))
    return reports


def _ci_cell(args) -> list[SimulationCellReport]:
    config, dist, n, cell_index = args
    family, params = _split_label(dist)
    truths = {idx: true_index(dist, config.z, idx) for idx in {m.split(":")[0] for m in config.intervals}}
    covered = {m: 0 for m in config.intervals}
    lengths = {m: [] for m in config.intervals}
    failures = {m: 0 for m in config.intervals}
    for r in range(config.reps):
        rng = _cell_rng(config.seed, cell_index, r)
        s = sample(dist, n, rng)
        for m in config.intervals:
            index = m.split(":")[0]
            try:
                ci = _interval_for(m, s, config.z, config.alpha)
            except (NoPoorObservations, DegenerateInterval):
                # CI undefined on this sample; solver bugs are not caught here
                failures[m] += 1
                continue
            if ci.contains(truths[index]):
                covered[m] += 1
            lengths[m].append(ci.length)
    reports = []
    for m in config.intervals:
        index = m.split(":")[0]
        used = config.reps - failures[m]
        coverage = covered[m] / used if used else float("nan")
        avg_length = float(np.mean(lengths[m])) if lengths[m] else float("nan")
        mc_se = float(np.sqrt(coverage * (1.0 - coverage) / used)) if used else float("nan")
        reports.append(SimulationCellReport(
            dist=family, params=params, n=n, index=index, method=m.split(":")[1],
            kind="ci", bias=None, mse=None, coverage=coverage, avg_length=avg_length,
            reps_used=used, failures=failures[m], mc_se=mc_se, truth=truths[index],
        ))
    return reports


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("POVINDEX_THREADS", "1")))
    except ValueError:
        return 1


def _run_cells(worker, config: MonteCarloConfig, dists) -> list[SimulationCellReport]:
    cells = [(config, dist, n, idx) for idx, (dist, n) in enumerate(product(dists, config.n_grid))]
    workers = min(_max_workers(), len(cells))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(worker, cells))
    else:
        chunks = [worker(c) for c in cells]
    return [rep for chunk in chunks for rep in chunk]


def run_estimator_grid(config: MonteCarloConfig, dists: list[DistributionSpec]) -> list[SimulationCellReport]:
    """Bias and MSE of the requested estimators over the (distribution, n) grid."""
    if not config.estimators:
        raise ValueError("config.estimators is empty")
    return _run_cells(_estimator_cell, config, dists)


def run_ci_grid(config: MonteCarloConfig, dists: list[DistributionSpec]) -> list[SimulationCellReport]:
    """Coverage probability and average length of the requested intervals.

    Replications whose interval is undefined (too few poor observations,
    collapsed feasible window) are counted as failures and excluded from the
    coverage and length averages.
    """
    if not config.intervals:
        raise ValueError("config.intervals is empty")
    return _run_cells(_ci_cell, config, dists)
