import numpy as np
import pytest

from accelib import oracles


@pytest.fixture
def quad_2():
    # diag(1, 10) quadratic with minimizer at the origin
    return oracles.make_quadratic([1.0, 10.0], np.zeros(2))


@pytest.fixture
def quad_6():
    rng = np.random.default_rng(7)
    eigs = np.linspace(1.0, 10.0, 6)
    return oracles.make_quadratic(eigs, rng.standard_normal(6), seed=7)


@pytest.fixture
def huber_1():
    return oracles.make_huber(0.1, 1.0, 1)


def seeded_quadratics(n, d=4, kappa=10.0, seed0=0):
    out = []
    for s in range(seed0, seed0 + n):
        rng = np.random.default_rng(s)
        eigs = np.concatenate([[1.0, kappa], rng.uniform(1.0, kappa, d - 2)])
        p = oracles.make_quadratic(eigs, rng.standard_normal(d), seed=s)
        x0 = rng.standard_normal(d) * 2.0
        out.append((p, x0))
    return out
