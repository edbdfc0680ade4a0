import math

import numpy as np
import pytest

from ghom.optics import InterferometerLayout
from ghom.qfim import EvalPoint
from ghom.spectra import GaussianJsaParams, build_quadrature

HALF_PI = math.pi / 2

# (criterion id, passed, detail), filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def jsa():
    return GaussianJsaParams()


@pytest.fixture(scope="session")
def quad(jsa):
    return build_quadrature(jsa, 80)


@pytest.fixture
def point(jsa, quad):
    def make(taus, thetas=None, controls=True):
        return EvalPoint(InterferometerLayout.ghom(taus, thetas, controls), jsa, quad)

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: int(r[0].split(".")[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {cid}: {detail}")
