import math
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import settings

from critexp.automaton import builtin_f2_abc, builtin_f2_standard
from critexp.pants import FGParams, holonomy, shear_family
from critexp.weyl import functional_from_roots


settings.register_profile("ci", deadline=None, derandomize=True)
settings.load_profile("ci")


@lru_cache(maxsize=None)
def pants_at(t: float, x1: float = 1.0, x2: float = 1.0):
    base = FGParams((x1, x2), (1.0, 1.0, 1.0), (1.0, 1.0, 1.0))
    return holonomy(shear_family(t, base))


@pytest.fixture(scope="session")
def abc():
    return builtin_f2_abc()


@pytest.fixture(scope="session")
def standard():
    return builtin_f2_standard()


@pytest.fixture(scope="session")
def phi_sum():
    return functional_from_roots(1, 1)


def random_sl(n, rng):
    m = rng.normal(size=(n, n))
    d = np.linalg.det(m)
    if d < 0:
        m[0] *= -1
        d = -d
    return m / d ** (1 / n)


def random_loxodromic(n, rng, spread=1.5):
    h = rng.normal(size=(n, n))
    logs = np.sort(rng.uniform(-spread, spread, n))[::-1]
    logs -= logs.mean()
    return h @ np.diag(np.exp(logs)) @ np.linalg.inv(h)


def log_svals(m):
    m = np.asarray(m, float)
    s = np.linalg.svd(m, compute_uv=False)
    return np.log(s) - np.log(s).mean()


def log_eigmods(m):
    e = np.sort(np.log(np.abs(np.linalg.eigvals(np.asarray(m, float)))))[::-1]
    return e - e.mean()


ISCLOSE = math.isclose


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
