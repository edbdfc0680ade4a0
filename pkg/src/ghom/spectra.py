"""Biphoton joint spectral density and the quadrature used for every
frequency double integral.

All frequencies are measured in units of the difference-coordinate width
``omega2`` (which defaults to 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

DEFAULT_NODES_PER_AXIS = 80


class NumericFailure(ArithmeticError):
    """Raised when an integrand produces non-finite values."""


@dataclass(frozen=True)
class GaussianJsaParams:
    """Two-mode Gaussian joint spectral amplitude.

    ``omega0`` is the centre frequency of each photon, ``omega1`` the spread
    of the sum coordinate and ``omega2`` the spread of the difference
    coordinate.
    """

    omega0: float = 5.0
    omega1: float = 1.0 / 3.0
    omega2: float = 1.0

    def __post_init__(self) -> None:
        for name in ("omega0", "omega1", "omega2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @property
    def spread(self) -> float:
        """Single-photon frequency spread sqrt(omega2**2 + 4 omega1**2) / 2."""
        return math.sqrt(self.omega2**2 + 4 * self.omega1**2) / 2


def jsa_density(params: GaussianJsaParams, omega, omega_prime):
    """|Psi_s(omega, omega')|**2 for the Gaussian family. Broadcasts."""
    omega = np.asarray(omega, dtype=float)
    omega_prime = np.asarray(omega_prime, dtype=float)
    u = omega + omega_prime - 2 * params.omega0
    v = omega - omega_prime
    sum_part = np.exp(-(u**2) / (8 * params.omega1**2)) / (math.sqrt(2 * math.pi) * params.omega1)
    diff_part = np.exp(-(v**2) / (2 * params.omega2**2)) / (math.sqrt(2 * math.pi) * params.omega2)
    out = sum_part * diff_part
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class Quadrature:
    """A fixed set of frequency pairs with positive weights.

    The JSA density is already folded into ``weight``, so the integral of
    ``f`` against the density is ``sum(weight * f(omega, omega_prime))``.
    Callers wanting a non-Gaussian JSA can build one directly from their own
    nodes and density-weighted weights.
    """

    omega: np.ndarray
    omega_prime: np.ndarray
    weight: np.ndarray
    nodes_per_axis: int
    params: GaussianJsaParams | None = field(default=None)

    def __post_init__(self) -> None:
        if not (self.omega.shape == self.omega_prime.shape == self.weight.shape):
            raise ValueError("node arrays must share one shape")
        if np.any(self.weight <= 0):
            raise ValueError("quadrature weights must be strictly positive")
        for arr in (self.omega, self.omega_prime, self.weight):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self.weight.size

    @property
    def nodes(self) -> list[tuple[float, float, float]]:
        return list(zip(self.omega.tolist(), self.omega_prime.tolist(), self.weight.tolist()))


def build_quadrature(params: GaussianJsaParams, nodes_per_axis: int = DEFAULT_NODES_PER_AXIS) -> Quadrature:
    """Tensor-product Gauss-Hermite rule matched to the Gaussian JSA.

    Nodes are laid out in the rotated coordinates u = omega + omega' - 2 omega0
    (standard deviation 2 omega1) and v = omega - omega' (standard deviation
    omega2), then mapped back. Exact for polynomials of degree
    ``2 * nodes_per_axis - 1`` in each of u and v.
    """
    if int(nodes_per_axis) != nodes_per_axis or nodes_per_axis < 2:
        raise ValueError(f"nodes_per_axis must be an integer >= 2, got {nodes_per_axis!r}")
    return _cached_quadrature(params, int(nodes_per_axis))


@lru_cache(maxsize=32)
def _cached_quadrature(params: GaussianJsaParams, n: int) -> Quadrature:
    x, w = hermegauss(n)
    w = w / math.sqrt(2 * math.pi)
    u = 2 * params.omega1 * x
    v = params.omega2 * x
    uu, vv = np.meshgrid(u, v, indexing="ij")
    weight = np.outer(w, w).ravel()
    omega = (params.omega0 + (uu + vv) / 2).ravel()
    omega_prime = (params.omega0 + (uu - vv) / 2).ravel()
    return Quadrature(omega, omega_prime, weight, n, params)


def integrate(quad: Quadrature, f: Callable[[np.ndarray, np.ndarray], np.ndarray] | float) -> complex:
    """Integrate ``f(omega, omega')`` against the JSA density.

    ``f`` is called once with the full node arrays and must broadcast. A
    constant may be passed instead of a callable.
    """
    values = f(quad.omega, quad.omega_prime) if callable(f) else f
    values = np.broadcast_to(np.asarray(values), quad.weight.shape)
    if not np.all(np.isfinite(values)):
        raise NumericFailure("integrand is not finite on every quadrature node")
    return complex(np.dot(quad.weight, values))
