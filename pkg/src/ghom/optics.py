"""Transfer matrices, two-photon amplitudes and their delay derivatives for
the generalized Hong-Ou-Mandel (GHOM) interferometer.

Matrices follow the creation-operator mapping a_dag = M(omega) c_dag, i.e.
input operators written in terms of output operators. In that convention
the elements compose left to right in device order, so for ``k`` modules

    M(omega) = Phi_1(omega) C Phi_2(omega) C ... Phi_k(omega) C

where ``Phi_l = diag(exp(+i phi_l / 2), exp(-i phi_l / 2))`` with
``phi_l = omega tau_l + theta_l`` and ``C`` is the calibrated coupler (a
balanced splitter with quarter-wave offsets, see :func:`coupler_matrix`).
All functions broadcast over array-valued frequencies; matrices carry the
two trailing axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class PhaseModule:
    """Time delay ``tau`` plus achromatic wave-plate phase ``theta``."""

    tau: float
    theta: float = 0.0


@dataclass(frozen=True)
class InterferometerLayout:
    modules: tuple[PhaseModule, ...]
    controls_enabled: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "modules", tuple(self.modules))
        if len(self.modules) < 1:
            raise ValueError("a layout needs at least one phase module")
        if self.modules[0].theta != 0.0:
            raise ValueError("the first module carries no achromatic phase (theta_1 must be 0)")

    @classmethod
    def ghom(
        cls,
        taus: Sequence[float],
        thetas: Sequence[float] | None = None,
        controls: bool = True,
    ) -> "InterferometerLayout":
        """Build a layout from delays ``tau_1..tau_k`` and phases ``theta_2..theta_k``."""
        taus = [float(t) for t in taus]
        if thetas is None:
            thetas = [0.0] * (len(taus) - 1)
        if len(thetas) != len(taus) - 1:
            raise ValueError(f"expected {len(taus) - 1} phases for k={len(taus)}, got {len(thetas)}")
        phases = [0.0, *(float(t) for t in thetas)]
        return cls(tuple(PhaseModule(t, th) for t, th in zip(taus, phases)), controls)

    @property
    def k(self) -> int:
        return len(self.modules)

    @property
    def taus(self) -> tuple[float, ...]:
        return tuple(m.tau for m in self.modules)

    @property
    def thetas(self) -> tuple[float, ...]:
        """Achromatic phases theta_2..theta_k."""
        return tuple(m.theta for m in self.modules[1:])

    def with_taus(self, taus: Sequence[float]) -> "InterferometerLayout":
        if len(taus) != self.k:
            raise ValueError(f"expected {self.k} delays, got {len(taus)}")
        return InterferometerLayout(
            tuple(PhaseModule(float(t), m.theta) for t, m in zip(taus, self.modules)),
            self.controls_enabled,
        )


class BiphotonAmplitudes(NamedTuple):
    """Bunching (``m11``, ``m22``) and anti-bunching (``m12``) amplitudes."""

    m11: np.ndarray | complex
    m22: np.ndarray | complex
    m12: np.ndarray | complex


def bs_matrix() -> np.ndarray:
    """Symmetric 50:50 beam splitter, 1/sqrt2 on the diagonal and i/sqrt2 off it."""
    return np.array([[1, 1j], [1j, 1]], dtype=complex) / math.sqrt(2)


def coupler_matrix() -> np.ndarray:
    """The splitter as it sits in the chain: ``Q B Q`` with ``Q = diag(1, -i)``.

    The fixed quarter-wave offsets on the lower arm make the k=2 chain equal
    the reference closed form exactly (they turn the symmetric splitter
    into the real Hadamard-type coupler). Offsets on the input and output
    arms do not change any observable built from a one-photon-per-port
    input.
    """
    q = np.diag([1.0, -1j])
    return q @ bs_matrix() @ q


def phase_matrix(module: PhaseModule, omega) -> np.ndarray:
    """diag(exp(i phi/2), exp(-i phi/2)) with phi = omega tau + theta."""
    return _diag_phase(np.asarray(omega, dtype=float) * module.tau + module.theta)


def _diag_phase(phi: np.ndarray) -> np.ndarray:
    out = np.zeros(np.shape(phi) + (2, 2), dtype=complex)
    half = np.exp(0.5j * np.asarray(phi))
    out[..., 0, 0] = half
    out[..., 1, 1] = np.conj(half)
    return out


def _transfer_and_generators(layout: InterferometerLayout, omega) -> tuple[np.ndarray, list[np.ndarray]]:
    """Return M(omega) and, per module, the generator G_l with
    dM/dtau_l = (i omega / 2) G_l M."""
    omega = np.asarray(omega, dtype=float)
    if not layout.controls_enabled:
        # achromatic plates belong to the control, so the bare line only sees the summed delay
        total = sum(layout.taus)
        gen = np.broadcast_to(SIGMA_Z, omega.shape + (2, 2))
        return _diag_phase(omega * total), [gen] * layout.k

    coupler = coupler_matrix()
    prefix = np.broadcast_to(np.eye(2, dtype=complex), omega.shape + (2, 2))
    generators = []
    for module in layout.modules:
        generators.append(_mm(prefix * _SIGMA_Z_COLUMNS, _adjoint(prefix)))
        half = np.exp(0.5j * (omega * module.tau + module.theta))
        scaled = np.stack([prefix[..., 0] * half[..., None], prefix[..., 1] * np.conj(half)[..., None]], axis=-1)
        prefix = _mm(scaled, coupler)
    return prefix, generators


_SIGMA_Z_COLUMNS = np.array([1.0, -1.0])


def _mm(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Batched 2x2 product; explicit arithmetic beats matmul on tiny matrices."""
    out = np.empty(np.broadcast_shapes(x.shape, y.shape), dtype=complex)
    x00, x01, x10, x11 = x[..., 0, 0], x[..., 0, 1], x[..., 1, 0], x[..., 1, 1]
    y00, y01, y10, y11 = y[..., 0, 0], y[..., 0, 1], y[..., 1, 0], y[..., 1, 1]
    out[..., 0, 0] = x00 * y00 + x01 * y10
    out[..., 0, 1] = x00 * y01 + x01 * y11
    out[..., 1, 0] = x10 * y00 + x11 * y10
    out[..., 1, 1] = x10 * y01 + x11 * y11
    return out


def _adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def transfer(layout: InterferometerLayout, omega) -> np.ndarray:
    """Creation-operator mapping matrix M(omega) of the whole device.

    With controls enabled this is the transpose of the mode-evolution
    product ``C Phi_k ... C Phi_1``; with controls disabled it is the bare
    delay line diag(exp(i omega tau_bar / 2), exp(-i omega tau_bar / 2)).
    """
    return _transfer_and_generators(layout, omega)[0]


def transfer_closed_k2(tau1: float, tau2: float, theta2: float, omega) -> np.ndarray:
    """Reference closed form of the k=2 mapping matrix."""
    omega = np.asarray(omega, dtype=float)
    half = np.exp(0.5j * omega * tau1)
    arg = (omega * tau2 + theta2) / 2
    out = np.empty(omega.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = half * np.cos(arg)
    out[..., 0, 1] = 1j * half * np.sin(arg)
    out[..., 1, 0] = 1j * np.conj(half) * np.sin(arg)
    out[..., 1, 1] = np.conj(half) * np.cos(arg)
    return out


def _pair(a: np.ndarray, b: np.ndarray) -> BiphotonAmplitudes:
    # a = M(omega), b = M(omega'); bilinear in (a, b)
    m11 = (a[..., 0, 0] * b[..., 1, 0] + b[..., 0, 0] * a[..., 1, 0]) / 2
    m22 = (a[..., 0, 1] * b[..., 1, 1] + b[..., 0, 1] * a[..., 1, 1]) / 2
    m12 = a[..., 0, 0] * b[..., 1, 1] + a[..., 1, 0] * b[..., 0, 1]
    return BiphotonAmplitudes(m11, m22, m12)


def _scalarize(amps: BiphotonAmplitudes) -> BiphotonAmplitudes:
    if np.ndim(amps.m11) == 0:
        return BiphotonAmplitudes(*(complex(x) for x in amps))
    return amps


def amplitudes(layout: InterferometerLayout, omega, omega_prime) -> BiphotonAmplitudes:
    """Exchange-symmetrized two-photon amplitudes at (omega, omega')."""
    return _scalarize(_pair(transfer(layout, omega), transfer(layout, omega_prime)))


def amplitudes_closed_k2(tau1: float, tau2: float, theta2: float, omega, omega_prime) -> BiphotonAmplitudes:
    """Reference closed-form k=2 amplitudes."""
    w = np.asarray(omega, dtype=float)
    wp = np.asarray(omega_prime, dtype=float)
    pre = np.exp(-0.5j * tau1 * (w + wp))
    diff = np.exp(1j * tau1 * w) - np.exp(1j * tau1 * wp)
    plus = np.exp(1j * tau1 * w) + np.exp(1j * tau1 * wp)
    minus_arg = tau2 * (w - wp) / 2
    plus_arg = tau2 * (w + wp) / 2 + theta2
    m11 = -0.25j * pre * (diff * np.sin(minus_arg) - plus * np.sin(plus_arg))
    m22 = 0.25j * pre * (diff * np.sin(minus_arg) + plus * np.sin(plus_arg))
    m12 = 0.5 * pre * (diff * np.cos(minus_arg) + plus * np.cos(plus_arg))
    return _scalarize(BiphotonAmplitudes(m11, m22, m12))


def amplitudes_and_derivatives(
    layout: InterferometerLayout, omega, omega_prime
) -> tuple[BiphotonAmplitudes, list[BiphotonAmplitudes]]:
    """Amplitudes together with their derivative with respect to every delay."""
    omega = np.asarray(omega, dtype=float)
    omega_prime = np.asarray(omega_prime, dtype=float)
    ma, gens_a = _transfer_and_generators(layout, omega)
    mb, gens_b = _transfer_and_generators(layout, omega_prime)
    half_a = (0.5j * omega)[..., None, None]
    half_b = (0.5j * omega_prime)[..., None, None]
    derivs = []
    for ga, gb in zip(gens_a, gens_b):
        da = half_a * _mm(ga, ma)
        db = half_b * _mm(gb, mb)
        left = _pair(da, mb)
        right = _pair(ma, db)
        derivs.append(_scalarize(BiphotonAmplitudes(*(x + y for x, y in zip(left, right)))))
    return _scalarize(_pair(ma, mb)), derivs


def amplitude_derivative(layout: InterferometerLayout, omega, omega_prime, index: int) -> BiphotonAmplitudes:
    """Analytic d/dtau_index of the amplitudes (``index`` is 0-based)."""
    if not 0 <= index < layout.k:
        raise IndexError(f"delay index {index} out of range for k={layout.k}")
    return amplitudes_and_derivatives(layout, omega, omega_prime)[1][index]


def coincidence_pointwise(layout: InterferometerLayout, omega, omega_prime):
    """|m12(omega, omega')|**2, the coincidence integrand."""
    value = np.abs(amplitudes(layout, omega, omega_prime).m12) ** 2
    return float(value) if np.ndim(value) == 0 else value
