import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from animc.data import Hyperparams, ModelState, MultiViewDataset

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def random_dataset(rng, n=12, dims=(5, 4), c=3, missing=0.25):
    """Small dataset with random masks; every instance kept in at least one view."""
    m = len(dims)
    gs = (rng.random((m, n)) > missing).astype(float)
    orphans = np.flatnonzero(gs.sum(axis=0) == 0)
    gs[rng.integers(0, m, size=orphans.size), orphans] = 1.0
    Xs = [rng.standard_normal((d, n)) for d in dims]
    labels = rng.integers(0, c, size=n)
    return MultiViewDataset.from_arrays(Xs, c, gs=list(gs), labels=labels)


def random_state(rng, ds, w=None):
    U = tuple(rng.standard_normal((d, ds.c)) for d in ds.dims)
    A = tuple(0.3 * rng.standard_normal((d, ds.c)) for d in ds.dims)
    V = rng.uniform(0.05, 1.0, size=(ds.n, ds.c))
    w = rng.uniform(0.2, 2.0, size=ds.m) if w is None else w
    return ModelState(U=U, A=A, V=V, w=w)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_problem(rng):
    ds = random_dataset(rng)
    return ds, random_state(rng, ds), Hyperparams()


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
