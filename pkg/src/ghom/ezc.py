"""Coincidence probability for arbitrary k and exclusive zero-coincidence
(EZC) checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .optics import InterferometerLayout, amplitudes
from .spectra import GaussianJsaParams, Quadrature, build_quadrature, integrate

DEFAULT_K4_PHASES = (math.pi / 3, math.pi / 4)


class NoEzcSolution(ValueError):
    pass


@dataclass(frozen=True)
class EzcPhases:
    k: int
    thetas: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.thetas) != self.k - 1:
            raise ValueError(f"k={self.k} needs {self.k - 1} phases")


def coincidence(layout: InterferometerLayout, jsa: GaussianJsaParams, quad: Quadrature | None = None) -> float:
    """R(tau): probability that each detector sees exactly one photon."""
    quad = quad or build_quadrature(jsa)
    amps = amplitudes(layout, quad.omega, quad.omega_prime)
    return integrate(quad, np.abs(amps.m12) ** 2).real


def ezc_phase_solution(k: int, theta2: float | None = None, theta4: float | None = None) -> EzcPhases:
    """Achromatic phases that produce an EZC point, where one is known.

    k=2 uses theta2 = pi/2. k=4 takes theta2 and theta4 (default pi/3 and
    pi/4) and returns theta3 = arccos(cot theta2 cot theta4). k=3 has no
    solution.
    """
    if k == 2:
        return EzcPhases(2, (math.pi / 2,))
    if k == 3:
        raise NoEzcSolution("no EZC solution exists for k=3")
    if k != 4:
        raise NoEzcSolution(f"no known EZC phase solution for k={k}")
    if theta2 is None:
        theta2 = DEFAULT_K4_PHASES[0]
    if theta4 is None:
        theta4 = DEFAULT_K4_PHASES[1]
    s2, s4 = math.sin(theta2), math.sin(theta4)
    if abs(s2 * s4) < 1e-12:
        raise NoEzcSolution("sin(theta2) sin(theta4) must be non-zero")
    product = (math.cos(theta2) / s2) * (math.cos(theta4) / s4)
    if abs(product) > 1:
        raise NoEzcSolution(f"|cot(theta2) cot(theta4)| = {abs(product):.6g} > 1, arccos undefined")
    wrap = 2 * math.pi
    return EzcPhases(4, (theta2 % wrap, math.acos(product), theta4 % wrap))


@dataclass(frozen=True)
class GridSpec:
    """One (min, max, count) triple per delay axis."""

    axes: tuple[tuple[float, float, int], ...]

    def __post_init__(self) -> None:
        for lo, hi, n in self.axes:
            if n < 2 or not hi > lo:
                raise ValueError(f"bad axis ({lo}, {hi}, {n})")

    @classmethod
    def uniform(cls, k: int, lo: float, hi: float, count: int) -> "GridSpec":
        return cls(tuple((lo, hi, count) for _ in range(k)))

    def values(self) -> list[np.ndarray]:
        return [np.linspace(lo, hi, n) for lo, hi, n in self.axes]

    def origin_index(self) -> tuple[int, ...] | None:
        idx = []
        for axis in self.values():
            hits = np.flatnonzero(np.abs(axis) < 1e-12)
            if hits.size == 0:
                return None
            idx.append(int(hits[0]))
        return tuple(idx)


@dataclass
class EzcReport:
    passed: bool
    grid: GridSpec
    tol: float
    zero_points: list[tuple[tuple[float, ...], float]] = field(default_factory=list)
    origin_value: float = float("nan")
    min_off_origin: float = float("nan")
    points_checked: int = 0

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        lines = [
            f"{verdict}: {len(self.zero_points)} grid point(s) with R < {self.tol:g} "
            f"out of {self.points_checked}",
            f"R(origin) = {self.origin_value:.6g}; min R away from origin = {self.min_off_origin:.6g}",
        ]
        if not self.passed:
            for tau, r in self.zero_points[:20]:
                lines.append(f"  zero at tau={tuple(round(t, 12) for t in tau)}: R={r:.3g}")
            if self.origin_value >= self.tol:
                lines.append(f"  origin is not a zero: R(0)={self.origin_value:.6g}")
        return "\n".join(lines)


def ezc_verify(
    thetas: Sequence[float],
    jsa: GaussianJsaParams,
    grid: GridSpec,
    tol: float = 1e-6,
    quad: Quadrature | None = None,
) -> EzcReport:
    """Check that R < tol on the grid exactly at the origin and nowhere else."""
    k = len(thetas) + 1
    if len(grid.axes) != k:
        raise ValueError(f"grid has {len(grid.axes)} axes, layout has k={k}")
    origin = grid.origin_index()
    if origin is None:
        raise ValueError("the grid must contain the origin")
    quad = quad or build_quadrature(jsa)
    axes = grid.values()
    report = EzcReport(passed=False, grid=grid, tol=tol)
    min_off = math.inf
    for idx in itertools.product(*(range(len(a)) for a in axes)):
        tau = tuple(float(axes[d][i]) for d, i in enumerate(idx))
        r = coincidence(InterferometerLayout.ghom(tau, thetas), jsa, quad)
        report.points_checked += 1
        if idx == origin:
            report.origin_value = r
        else:
            min_off = min(min_off, r)
        if r < tol:
            report.zero_points.append((tau, r))
    report.min_off_origin = min_off
    report.passed = len(report.zero_points) == 1 and report.origin_value < tol
    return report
