"""Quantum Fisher information matrix of the GHOM output state.

The output state is

    |Psi> = integral Psi_s [m11 c1^dag c1^dag + m22 c2^dag c2^dag
                            + m12 c1^dag(w) c2^dag(w')] |0>

and since the bunching pieces create two photons in the same mode their
norm picks up a factor 2. Every inner product below therefore weights the
(m11, m22, m12) channels by (2, 2, 1); with that weighting the state norm
is exactly one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .optics import InterferometerLayout, amplitudes_and_derivatives
from .spectra import (
    DEFAULT_NODES_PER_AXIS,
    GaussianJsaParams,
    NumericFailure,
    Quadrature,
    build_quadrature,
)

CHANNEL_WEIGHTS = np.array([2.0, 2.0, 1.0])
DEFAULT_CONDITION_CAP = 1e12


class SingularQfimError(np.linalg.LinAlgError):
    """The QFIM cannot be inverted; the parameters are intertwined.

    ``null_vector`` is the (unit) direction in delay space that carries no
    information.
    """

    def __init__(self, message: str, null_vector: np.ndarray, condition: float):
        super().__init__(message)
        self.null_vector = null_vector
        self.condition = condition


@dataclass(frozen=True)
class EvalPoint:
    layout: InterferometerLayout
    jsa: GaussianJsaParams
    quad: Quadrature

    def __post_init__(self) -> None:
        if self.quad.params is not None and self.quad.params != self.jsa:
            raise ValueError("quadrature was built for a different JSA")

    @classmethod
    def create(
        cls,
        layout: InterferometerLayout,
        jsa: GaussianJsaParams | None = None,
        nodes_per_axis: int = DEFAULT_NODES_PER_AXIS,
    ) -> "EvalPoint":
        jsa = jsa or GaussianJsaParams()
        return cls(layout, jsa, build_quadrature(jsa, nodes_per_axis))

    def with_layout(self, layout: InterferometerLayout) -> "EvalPoint":
        return EvalPoint(layout, self.jsa, self.quad)


@dataclass(frozen=True)
class OverlapSet:
    """d_overlaps[i, j] = <d_i Psi | d_j Psi>, s_overlaps[i] = <d_i Psi | Psi>."""

    d_overlaps: np.ndarray
    s_overlaps: np.ndarray
    norm: float


@dataclass(frozen=True)
class QfimMatrix:
    entries: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __getitem__(self, idx):
        return self.entries[idx]

    @property
    def k(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.entries)


@dataclass(frozen=True)
class QcrbBounds:
    """Per-parameter variance bounds for ``copies`` repetitions.

    ``inverse_diagonal[i] = [H^-1]_ii / M`` is the multiparameter bound,
    ``diagonal[i] = 1 / (M H_ii)`` the bound with every other delay known.
    """

    inverse_diagonal: np.ndarray
    diagonal: np.ndarray
    copies: int


def overlaps(point: EvalPoint) -> OverlapSet:
    quad = point.quad
    amps, derivs = amplitudes_and_derivatives(point.layout, quad.omega, quad.omega_prime)
    m = np.stack(amps)  # (3, N)
    dm = np.stack([np.stack(d) for d in derivs])  # (k, 3, N)
    weighted = CHANNEL_WEIGHTS[:, None] * quad.weight[None, :]
    dm_conj_w = np.conj(dm) * weighted
    d_overlaps = np.einsum("icn,jcn->ij", dm_conj_w, dm)
    s_overlaps = np.einsum("icn,cn->i", dm_conj_w, m)
    norm = float(np.sum(weighted * np.abs(m) ** 2))
    if not (np.all(np.isfinite(d_overlaps)) and np.all(np.isfinite(s_overlaps))):
        raise NumericFailure("non-finite state-derivative overlaps")
    return OverlapSet(d_overlaps, s_overlaps, norm)


def qfim_from_overlaps(ov: OverlapSet) -> QfimMatrix:
    s = ov.s_overlaps
    h = 4 * np.real(ov.d_overlaps - np.outer(np.conj(s), s))
    return QfimMatrix((h + h.T) / 2)


def qfim(point: EvalPoint) -> QfimMatrix:
    """4 Re[<d_i Psi|d_j Psi> - <d_i Psi|Psi><Psi|d_j Psi>] for the pure output state."""
    return qfim_from_overlaps(overlaps(point))


def qfim_det(h: QfimMatrix | np.ndarray) -> float:
    return float(np.linalg.det(np.asarray(h)))


def condition_number(h: QfimMatrix | np.ndarray) -> tuple[float, np.ndarray]:
    """Condition number of a PSD matrix and its least-informative eigenvector."""
    vals, vecs = np.linalg.eigh(np.asarray(h))
    null = vecs[:, 0]
    # fix the sign so the reported direction is reproducible
    null = null * np.sign(null[np.argmax(np.abs(null))])
    if vals[0] <= 0:
        return float("inf"), null
    return float(vals[-1] / vals[0]), null


def qcrb_bounds(
    h: QfimMatrix | np.ndarray,
    copies: int = 1,
    condition_cap: float = DEFAULT_CONDITION_CAP,
) -> QcrbBounds:
    """Cramer-Rao variance bounds; refuses singular or ill-conditioned matrices."""
    if copies < 1:
        raise ValueError("copies must be >= 1")
    arr = np.asarray(h, dtype=float)
    cond, null = condition_number(arr)
    if cond > condition_cap:
        raise SingularQfimError(
            f"QFIM is singular or ill-conditioned (condition {cond:.3g} > {condition_cap:.3g}); "
            f"parameters are intertwined along {np.array2string(null, precision=6)}",
            null,
            cond,
        )
    inv_diag = np.diag(np.linalg.inv(arr)) / copies
    diag = 1.0 / (copies * np.diag(arr))
    # [H^-1]_ii >= 1 / H_ii for positive definite H
    assert np.all(inv_diag >= diag * (1 - 1e-9)), "QCRB ordering violated"
    return QcrbBounds(inv_diag, diag, copies)


def weak_commutativity(point: EvalPoint, i: int, j: int) -> float:
    """Im <d_i Psi | d_j Psi>; zero means the pair is compatible."""
    if i == j:
        raise ValueError("weak commutativity needs two distinct parameters")
    return float(np.imag(overlaps(point).d_overlaps[i, j]))
