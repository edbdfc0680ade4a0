import math

import numpy as np
import pytest

from ghom.ezc import (
    GridSpec,
    NoEzcSolution,
    coincidence,
    ezc_phase_solution,
    ezc_verify,
)
from ghom.optics import InterferometerLayout
from ghom.qfim import EvalPoint, qfim, qfim_det

HALF_PI = math.pi / 2


def test_phase_solutions():
    assert ezc_phase_solution(2).thetas == (HALF_PI,)
    k4 = ezc_phase_solution(4)
    assert k4.thetas == pytest.approx((math.pi / 3, math.acos(1 / math.sqrt(3)), math.pi / 4), abs=1e-15)
    other = ezc_phase_solution(4, theta2=1.2, theta4=1.0)
    assert math.cos(other.thetas[1]) == pytest.approx(1 / math.tan(1.2) / math.tan(1.0))


def test_phase_solution_errors():
    with pytest.raises(NoEzcSolution, match="no EZC solution"):
        ezc_phase_solution(3)
    with pytest.raises(NoEzcSolution):
        ezc_phase_solution(4, theta2=0.2, theta4=0.2)
    with pytest.raises(NoEzcSolution):
        ezc_phase_solution(4, theta2=0.0, theta4=1.0)
    with pytest.raises(NoEzcSolution):
        ezc_phase_solution(5)


def test_coincidence_examples(jsa, quad):
    assert abs(coincidence(InterferometerLayout.ghom([0, 0], [HALF_PI]), jsa, quad)) < 1e-10
    assert coincidence(InterferometerLayout.ghom([0, 0], [0.0]), jsa, quad) == pytest.approx(1.0, abs=1e-12)
    k4 = InterferometerLayout.ghom([0] * 4, ezc_phase_solution(4).thetas)
    assert abs(coincidence(k4, jsa, quad)) < 1e-8


def test_coincidence_bounds(jsa, quad):
    rng = np.random.default_rng(11)
    for _ in range(50):
        k = int(rng.integers(1, 6))
        layout = InterferometerLayout.ghom(rng.uniform(-3, 3, k), rng.uniform(0, 2 * math.pi, k - 1))
        r = coincidence(layout, jsa, quad)
        assert -1e-12 <= r <= 1 + 1e-10


@pytest.mark.parametrize("theta", [0.0, HALF_PI])
def test_coincidence_sign_flip(jsa, quad, theta):
    rng = np.random.default_rng(12)
    for t1, t2 in rng.uniform(-3, 3, (20, 2)):
        a = coincidence(InterferometerLayout.ghom([t1, t2], [theta]), jsa, quad)
        b = coincidence(InterferometerLayout.ghom([-t1, -t2], [theta]), jsa, quad)
        assert abs(a - b) < 1e-12


def test_grid_origin_lookup():
    g = GridSpec.uniform(2, -3, 3, 41)
    assert g.origin_index() == (20, 20)
    assert GridSpec.uniform(2, -3, 3, 40).origin_index() is None
    with pytest.raises(ValueError):
        GridSpec(((0.0, 1.0, 1),))


def test_verify_requires_origin(jsa):
    with pytest.raises(ValueError):
        ezc_verify([HALF_PI], jsa, GridSpec.uniform(2, -3, 3, 4))
    with pytest.raises(ValueError):
        ezc_verify([HALF_PI], jsa, GridSpec.uniform(3, -3, 3, 5))


@pytest.mark.parametrize("count", [11, 41, 61])
def test_verify_k2_passes_on_refinements(jsa, quad, count):
    report = ezc_verify([HALF_PI], jsa, GridSpec.uniform(2, -3, 3, count), 1e-6, quad)
    assert report.passed, report.summary()
    assert report.zero_points[0][0] == (0.0, 0.0)
    assert report.points_checked == count**2


def test_verify_k2_theta_zero_fails(jsa, quad):
    report = ezc_verify([0.0], jsa, GridSpec.uniform(2, -3, 3, 41), 1e-6, quad)
    assert not report.passed
    assert report.origin_value == pytest.approx(1.0, abs=1e-12)
    assert "R(0)=1" in report.summary()


@pytest.mark.slow
def test_verify_k4_coarse_grid(jsa, quad):
    report = ezc_verify(ezc_phase_solution(4).thetas, jsa, GridSpec.uniform(4, -2, 2, 9), 1e-5, quad)
    assert report.passed, report.summary()


def test_k3_phase_scan_logged(jsa, quad):
    # exploratory: no exact solution is claimed for k=3, only logged behaviour at the origin
    lines = []
    for th2 in np.linspace(0, math.pi, 5):
        for th3 in np.linspace(0, math.pi, 5):
            layout = InterferometerLayout.ghom([0, 0, 0], [th2, th3])
            r = coincidence(layout, jsa, quad)
            det = qfim_det(qfim(EvalPoint(layout, jsa, quad)))
            lines.append(f"theta=({th2:.3f},{th3:.3f}) R(0)={r:.3g} det={det:.3g}")
    print("\n".join(lines))
    assert len(lines) == 25
