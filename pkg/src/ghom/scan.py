"""Two-axis parameter sweeps and the numeric-vs-closed-form comparison."""

from __future__ import annotations

import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import oracle
from .ezc import coincidence
from .optics import InterferometerLayout
from .qfim import EvalPoint, qfim, qfim_det
from .spectra import DEFAULT_NODES_PER_AXIS, GaussianJsaParams, build_quadrature

QUANTITIES = ("det", "h11", "h22", "h12", "coincidence")
_AXIS_RE = re.compile(r"^(tau|theta)(\d+)$")


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int

    def __post_init__(self) -> None:
        if not _AXIS_RE.match(self.name):
            raise ValueError(f"axis name must look like tau<i> or theta<i>, got {self.name!r}")
        if self.count < 2:
            raise ValueError("axis count must be >= 2")
        if not self.hi > self.lo:
            raise ValueError(f"axis {self.name}: max must exceed min")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


def apply_axis(taus: list[float], thetas: list[float], name: str, value: float) -> None:
    kind, num = _AXIS_RE.match(name).groups()
    i = int(num)
    k = len(taus)
    if kind == "tau":
        if not 1 <= i <= k:
            raise ValueError(f"{name} out of range for k={k}")
        taus[i - 1] = value
    else:
        if not 2 <= i <= k:
            raise ValueError(f"{name} out of range for k={k} (phases run theta2..theta{k})")
        thetas[i - 2] = value


def point_value(
    quantity: str,
    layout: InterferometerLayout,
    jsa: GaussianJsaParams,
    nodes_per_axis: int = DEFAULT_NODES_PER_AXIS,
) -> float:
    quad = build_quadrature(jsa, nodes_per_axis)
    if quantity == "coincidence":
        return coincidence(layout, jsa, quad)
    h = qfim(EvalPoint(layout, jsa, quad))
    if quantity == "det":
        return qfim_det(h)
    if layout.k < 2:
        raise ValueError(f"{quantity} needs k >= 2")
    i, j = {"h11": (0, 0), "h22": (1, 1), "h12": (0, 1)}[quantity]
    return float(h[i, j])


def _worker(job):
    quantity, taus, thetas, controls, jsa, nodes = job
    return point_value(quantity, InterferometerLayout.ghom(taus, thetas, controls), jsa, nodes)


def scan_grid(
    quantity: str,
    base: InterferometerLayout,
    jsa: GaussianJsaParams,
    axes: Sequence[Axis],
    nodes_per_axis: int = DEFAULT_NODES_PER_AXIS,
    jobs: int = 1,
) -> list[tuple[float, float, float]]:
    """Evaluate ``quantity`` over the product of two axes.

    Rows come back ordered by (axis1, axis2) regardless of ``jobs``.
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
    if len(axes) != 2:
        raise ValueError("a scan varies exactly two axes")
    if axes[0].name == axes[1].name:
        raise ValueError("the two scan axes must differ")
    coords = []
    work = []
    for a in axes[0].values():
        for b in axes[1].values():
            taus, thetas = list(base.taus), list(base.thetas)
            apply_axis(taus, thetas, axes[0].name, float(a))
            apply_axis(taus, thetas, axes[1].name, float(b))
            coords.append((float(a), float(b)))
            work.append((quantity, tuple(taus), tuple(thetas), base.controls_enabled, jsa, nodes_per_axis))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(_worker, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        values = [_worker(job) for job in work]
    return [(a, b, v) for (a, b), v in zip(coords, values)]


@dataclass
class EntryDeviation:
    """Worst disagreement for one QFIM entry.

    ``max_rel`` covers points where |closed| >= abs_floor, ``max_abs`` the
    rest; ``worst_point`` is where the larger violation happened.
    """

    name: str
    max_rel: float
    max_abs: float
    worst_point: tuple[float, float]
    rel_tol: float
    abs_tol: float

    @property
    def passed(self) -> bool:
        return self.max_rel <= self.rel_tol and self.max_abs <= self.abs_tol


def oracle_diff(
    jsa: GaussianJsaParams,
    lo: float = -3.0,
    hi: float = 3.0,
    count: int = 41,
    theta2: float = math.pi / 2,
    nodes_per_axis: int = DEFAULT_NODES_PER_AXIS,
    rel_tol: float = 1e-6,
    abs_tol: float = 1e-8,
    abs_floor: float = 1e-3,
) -> list[EntryDeviation]:
    """Compare numeric QFIM entries with the closed forms on a square grid."""
    oracle._check_theta2(theta2)
    quad = build_quadrature(jsa, nodes_per_axis)
    closed = {"h11": oracle.h11_closed, "h22": oracle.h22_closed, "h12": oracle.h12_closed}
    index = {"h11": (0, 0), "h22": (1, 1), "h12": (0, 1)}
    worst = {name: [0.0, 0.0, (math.nan, math.nan), -1.0] for name in closed}
    grid = np.linspace(lo, hi, count)
    for t1 in grid:
        for t2 in grid:
            h = qfim(EvalPoint(InterferometerLayout.ghom([t1, t2], [theta2]), jsa, quad))
            for name, fn in closed.items():
                ref = fn(t1, t2, jsa, theta2)
                diff = abs(float(h[index[name]]) - ref)
                entry = worst[name]
                if abs(ref) >= abs_floor:
                    score = diff / abs(ref)
                    entry[0] = max(entry[0], score)
                    badness = score / rel_tol
                else:
                    entry[1] = max(entry[1], diff)
                    badness = diff / abs_tol
                if badness > entry[3]:
                    entry[2], entry[3] = (float(t1), float(t2)), badness
    return [EntryDeviation(name, e[0], e[1], e[2], rel_tol, abs_tol) for name, e in worst.items()]
