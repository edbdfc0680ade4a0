import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghom.spectra import (
    GaussianJsaParams,
    NumericFailure,
    build_quadrature,
    integrate,
    jsa_density,
)

pos = st.floats(0.05, 10.0)
freq = st.floats(-20.0, 20.0)


def test_density_at_centre(jsa):
    assert jsa_density(jsa, 5.0, 5.0) == pytest.approx(1 / (2 * math.pi / 3), abs=1e-12)
    assert jsa_density(jsa, 5.0, 5.0) == pytest.approx(0.477465, abs=1e-6)


@given(pos, pos, pos, freq, freq)
def test_density_exchange_symmetric_and_nonnegative(w0, o1, o2, a, b):
    p = GaussianJsaParams(w0, o1, o2)
    assert jsa_density(p, a, b) == jsa_density(p, b, a)
    assert jsa_density(p, a, b) >= 0


def test_density_integrates_to_one_on_a_fine_grid(jsa):
    # independent of the quadrature: a uniform Riemann sum is spectrally accurate for a Gaussian
    x, dx = np.linspace(0, 10, 1201, retstep=True)
    w, wp = np.meshgrid(x, x, indexing="ij")
    total = jsa_density(jsa, w, wp).sum() * dx**2
    assert total == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("bad", [(0, 1, 1), (5, 0, 1), (5, 1, -1), (5, math.nan, 1)])
def test_params_validated(bad):
    with pytest.raises(ValueError):
        GaussianJsaParams(*bad)


def test_spread(jsa):
    assert jsa.spread == pytest.approx(math.sqrt(1 + 4 / 9) / 2)


@pytest.mark.parametrize("n", [40, 80, 160])
def test_unit_integral(jsa, n):
    q = build_quadrature(jsa, n)
    assert len(q) == n * n
    assert np.all(q.weight > 0)
    assert abs(integrate(q, 1.0) - 1) < 1e-12
    assert abs(integrate(q, lambda w, wp: np.ones_like(w)) - 1) < 1e-12


def test_node_count_and_readonly(quad):
    assert len(quad.nodes) == 6400
    with pytest.raises(ValueError):
        quad.weight[0] = 1.0


def test_rejects_too_few_nodes(jsa):
    with pytest.raises(ValueError):
        build_quadrature(jsa, 1)


def test_first_moments(quad, jsa):
    assert abs(integrate(quad, lambda w, wp: w - wp)) < 1e-12
    assert abs(integrate(quad, lambda w, wp: w + wp) - 2 * jsa.omega0) < 1e-10


def test_second_moments(quad, jsa):
    assert abs(integrate(quad, lambda w, wp: (w - wp) ** 2) - jsa.omega2**2) < 1e-10
    expected = 4 * jsa.omega0**2 + 4 * jsa.omega1**2
    assert abs(integrate(quad, lambda w, wp: (w + wp) ** 2) - expected) < 1e-8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_even_difference_moments(quad, jsa, n):
    # E[v^{2n}] = sigma^{2n} (2n-1)!! for v ~ N(0, sigma^2)
    exact = jsa.omega2 ** (2 * n) * math.prod(range(1, 2 * n, 2))
    assert abs(integrate(quad, lambda w, wp: (w - wp) ** (2 * n)) - exact) < 1e-8


@settings(max_examples=30, deadline=None)
@given(pos, pos, pos)
def test_moments_for_any_params(w0, o1, o2):
    p = GaussianJsaParams(w0, o1, o2)
    q = build_quadrature(p, 20)
    assert integrate(q, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert integrate(q, lambda w, wp: w + wp).real == pytest.approx(2 * w0, rel=1e-10)
    assert integrate(q, lambda w, wp: (w - wp) ** 2).real == pytest.approx(o2**2, rel=1e-10)


def test_nonfinite_integrand_raises(quad):
    with pytest.raises(NumericFailure):
        integrate(quad, lambda w, wp: np.where(w > 5, np.inf, 0.0))
