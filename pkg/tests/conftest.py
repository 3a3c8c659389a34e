import numpy as np
import pytest

from povindex import Exponential, IncomeSample, LogNormal, Pareto, sample

Z_DEFAULT = 1.41

FAMILIES = [
    Exponential(2.0),
    Exponential(4.0),
    Exponential(6.0),
    Pareto(1.0, 1.0),
    Pareto(1.0, 2.0),
    Pareto(1.0, 3.0),
    LogNormal(0.0, 1.0),
    LogNormal(1.0, 1.0),
    LogNormal(1.0, 2.0),
]


def make_samples(count, n_lo, n_hi, seed, families=FAMILIES):
    """Seeded mixed-family samples cycling through the study distributions."""
    samples = []
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(i,)))
        n = int(rng.integers(n_lo, n_hi + 1))
        samples.append(sample(families[i % len(families)], n, rng))
    return samples


@pytest.fixture
def sample3():
    return IncomeSample([0.5, 1.0, 2.0])


@pytest.fixture
def sample4():
    return IncomeSample([0.2, 0.4, 0.6, 2.0])
