"""Closed-form k=2 reference values for a Gaussian JSA.

The ``*_closed`` functions are literal transcriptions of the published
expressions; the ``*_regrouped`` functions are a second, independent
transcription in which the products of exponentials have been merged by
hand. The test suite cross-checks the two before either is trusted.

The QFIM entries are only defined for theta2 = pi/2; the coincidence
probability accepts any theta2. Everything broadcasts over numpy arrays.
"""

from __future__ import annotations

import math

import numpy as np
from numpy import cos, exp, sin

from .spectra import GaussianJsaParams

EZC_THETA2 = math.pi / 2


class OracleDomainError(ValueError):
    """The closed forms were requested outside theta2 = pi/2."""


def _check_theta2(theta2: float) -> None:
    if abs(math.remainder(theta2 - EZC_THETA2, 2 * math.pi)) > 1e-9:
        raise OracleDomainError(f"closed-form QFIM entries require theta2 = pi/2, got {theta2!r}")


def _unpack(params: GaussianJsaParams):
    return params.omega0, params.omega1, params.omega2


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


# The *_expr functions hold the transcriptions; ``xp`` is any namespace with
# exp/cos/sin/cosh/sinh (numpy for evaluation, sympy for symbolic checks).


def h11_closed(tau1, tau2, params: GaussianJsaParams, theta2: float = EZC_THETA2):
    _check_theta2(theta2)
    t1, t2 = np.asarray(tau1, float), np.asarray(tau2, float)
    return _out(_h11_expr(t1, t2, *_unpack(params)))


def _h11_expr(t1, t2, w0, O1, O2, xp=np):
    first = xp.exp(-(t1 + t2) ** 2 * O2**2 / 2) * (t1 + t2 + xp.exp(2 * t1 * t2 * O2**2) * (t1 - t2)) + 2 * xp.exp(
        -2 * t2**2 * O1**2 - t1**2 * O2**2 / 2
    ) * t1 * xp.cos(2 * t2 * w0)
    second = (
        12
        + xp.exp(-(t1 - t2) ** 2 * O2**2 / 2) * (1 - (t1 - t2) ** 2 * O2**2)
        + xp.exp(-(t1 + t2) ** 2 * O2**2 / 2)
        * (1 - (t1 + t2) ** 2 * O2**2 + 2 * xp.exp(t1 * (t1 + 2 * t2) * O2**2 / 2) * (1 - t2**2 * O2**2))
        - 2
        * xp.exp(-2 * t2**2 * O1**2 - t1**2 * O2**2 / 2)
        * (xp.exp(t1**2 * O2**2 / 2) + t1**2 * O2**2 - 1)
        * xp.cos(2 * t2 * w0)
    )
    return -(O2**4) / 256 * first**2 + O2**2 / 16 * second


def h22_closed(tau1, tau2, params: GaussianJsaParams, theta2: float = EZC_THETA2):
    _check_theta2(theta2)
    t1, t2 = np.asarray(tau1, float), np.asarray(tau2, float)
    return _out(_h22_expr(t1, t2, *_unpack(params)))


def _h22_expr(t1, t2, w0, O1, O2, xp=np):
    e_cross = xp.exp(2 * t1 * t2 * O2**2)
    prefactor = -xp.exp(-4 * t2**2 * O1**2 - t1**2 * O2**2 - (t1 + t2) ** 2 * O2**2) / 256
    bracket = (
        xp.exp(2 * t2**2 * O1**2 + t1**2 * O2**2 / 2)
        * (t1 - e_cross * t1 + t2 + e_cross * t2 - 2 * xp.exp(t1 * (t1 + 2 * t2) * O2**2 / 2) * t2)
        * O2**2
        - 4
        * xp.exp((t1 + t2) ** 2 * O2**2 / 2)
        * (1 + xp.exp(t1**2 * O2**2 / 2))
        * (-2 * t2 * O1**2 * xp.cos(2 * t2 * w0) + w0 * xp.sin(2 * t2 * w0))
    )
    tail = xp.exp(-(t1 + t2) ** 2 * O2**2 / 2) * (
        O2**2
        - (t1 + t2) ** 2 * O2**4
        - e_cross * O2**2 * ((t1 - t2) ** 2 * O2**2 - 1)
        + 6 * xp.exp((t1 + t2) ** 2 * O2**2 / 2) * (4 * w0**2 + 4 * O1**2 + O2**2)
        + 2 * xp.exp(t1 * (t1 + 2 * t2) * O2**2 / 2) * O2**2 * (t2**2 * O2**2 - 1)
        + 6 * xp.exp(t2 * (2 * t1 + t2) * O2**2 / 2) * (4 * w0**2 + 4 * O1**2 - O2**2 + t1**2 * O2**4)
    ) - 8 * xp.exp(-2 * t2**2 * O1**2 - t1**2 * O2**2 / 2) * (1 + xp.exp(t1**2 * O2**2 / 2)) * (
        (4 * t2**2 * O1**4 - w0**2 - O1**2) * xp.cos(2 * t2 * w0) + 4 * t2 * w0 * O1**2 * xp.sin(2 * t2 * w0)
    )
    return prefactor * bracket**2 + tail / 16


def h12_closed(tau1, tau2, params: GaussianJsaParams, theta2: float = EZC_THETA2):
    _check_theta2(theta2)
    t1, t2 = np.asarray(tau1, float), np.asarray(tau2, float)
    return _out(_h12_expr(t1, t2, *_unpack(params)))


def _h12_expr(t1, t2, w0, O1, O2, xp=np):
    e_cross = xp.exp(2 * t1 * t2 * O2**2)
    osc = 2 * t2 * O1**2 * xp.cos(2 * t2 * w0) + w0 * xp.sin(2 * t2 * w0)
    term1 = -64 * xp.exp(-2 * t2**2 * O1**2 - t1**2 * O2**2 / 2) * t1 * osc
    left = xp.exp(-(t1 + t2) ** 2 * O2**2 / 2) * (t1 + t2 + e_cross * (t1 - t2)) + 2 * xp.exp(
        -2 * t2**2 * O1**2 - t1**2 * O2**2 / 2
    ) * t1 * xp.cos(2 * t2 * w0)
    right = (
        xp.exp(2 * t2**2 * O1**2)
        * ((1 - e_cross) * t1 + (1 + e_cross - 2 * xp.exp(t1 * (t1 + 2 * t2) * O2**2 / 2)) * t2)
        * O2**2
        + 4 * (xp.exp((t1 + t2) ** 2 * O2**2 / 2) + xp.exp(t2 * (2 * t1 + t2) * O2**2 / 2)) * osc
    )
    term2 = xp.exp(-2 * t2**2 * O1**2 - (t1 + t2) ** 2 * O2**2 / 2) * left * right
    term3 = (
        32
        * xp.exp(-(t1**2 + t2**2) * O2**2 / 2)
        * (
            -2 * t1 * t2 * O2**2 * xp.cosh(t1 * t2 * O2**2)
            + ((t1**2 + t2**2) * O2**2 - 1) * xp.sinh(t1 * t2 * O2**2)
        )
    )
    return O2**2 / 256 * (term1 + term2 + term3)


def coincidence_closed(tau1, tau2, theta2, params: GaussianJsaParams):
    """Coincidence probability R(tau1, tau2) for any theta2."""
    t1, t2 = np.asarray(tau1, float), np.asarray(tau2, float)
    return _out(_coincidence_expr(t1, t2, *_unpack(params), theta2))


def _coincidence_expr(t1, t2, w0, O1, O2, theta2, xp=np):
    return (
        4
        - xp.exp(-(t1 - t2) ** 2 * O2**2 / 2)
        + 2 * xp.exp(-(t2**2) * O2**2 / 2)
        - xp.exp(-(t1 + t2) ** 2 * O2**2 / 2)
        + 2
        * xp.exp(-2 * t2**2 * O1**2 - t1**2 * O2**2 / 2)
        * (1 + xp.exp(t1**2 * O2**2 / 2))
        * xp.cos(2 * t2 * w0 + 2 * theta2)
    ) / 8


def h11_on_axis(tau1, params: GaussianJsaParams):
    """[H]_11 along tau2 = 0 at theta2 = pi/2."""
    w0, O1, O2 = _unpack(params)
    x = np.asarray(tau1, float) ** 2 * O2**2
    return _out(O2**2 / 16 * (12 - exp(-x) * x + 4 * exp(-x / 2) * (1 - x)))


def h22_on_axis(tau2, params: GaussianJsaParams):
    """[H]_22 along tau1 = 0 at theta2 = pi/2, as published."""
    w0, O1, O2 = _unpack(params)
    t = np.asarray(tau2, float)
    value = (
        exp(-4 * t**2 * O1**2)
        / 8
        * (
            -(w0**2)
            - 4 * t**2 * O1**4
            + 24 * exp(4 * t**2 * O1**2) * (w0**2 + O1**2)
            + w0**2 * cos(4 * t * w0)
            - 4 * t**2 * O1**4 * cos(4 * t * w0)
            + 8
            * exp(2 * t**2 * O1**2)
            * (
                (w0**2 + O1**2 - 4 * t**2 * O1**4) * cos(2 * t * w0)
                - 4 * t * w0 * O1**2 * sin(2 * t * w0)
                - 4 * t * w0 * O1**2 * sin(4 * t * w0)
            )
        )
    )
    return _out(value)


def qfim_max(params: GaussianJsaParams) -> tuple[float, float]:
    """Diagonal QFIM values at the EZC point: (omega2**2, 4 (omega0**2 + omega1**2))."""
    return params.omega2**2, 4 * (params.omega0**2 + params.omega1**2)


# second transcription: exponentials merged, e.g. exp(-(t1+t2)^2 a/2) exp(2 t1 t2 a) = exp(-(t1-t2)^2 a/2)


def _shared(t1, t2, params):
    w0, O1, O2 = _unpack(params)
    a = O2**2
    g_plus = exp(-((t1 + t2) ** 2) * a / 2)
    g_minus = exp(-((t1 - t2) ** 2) * a / 2)
    g_two = exp(-(t2**2) * a / 2)
    e_sum = exp(-2 * t2**2 * O1**2)
    env = e_sum * exp(-(t1**2) * a / 2)
    return w0, O1, a, g_plus, g_minus, g_two, e_sum, env


def h11_regrouped(tau1, tau2, params: GaussianJsaParams):
    t1, t2 = np.asarray(tau1, float), np.asarray(tau2, float)
    w0, O1, a, gp, gm, g2, es, env = _shared(t1, t2, params)
    c = cos(2 * t2 * w0)
    first = gp * (t1 + t2) + gm * (t1 - t2) + 2 * t1 * env * c
    second = (
        12
        + gm * (1 - (t1 - t2) ** 2 * a)
        + gp * (1 - (t1 + t2) ** 2 * a)
        + 2 * g2 * (1 - t2**2 * a)
        - 2 * (es + (t1**2 * a - 1) * env) * c
    )
    return _out(a / 16 * second - (a * first) ** 2 / 256)


def h22_regrouped(tau1, tau2, params: GaussianJsaParams):
    t1, t2 = np.asarray(tau1, float), np.asarray(tau2, float)
    w0, O1, a, gp, gm, g2, es, env = _shared(t1, t2, params)
    c, s = cos(2 * t2 * w0), sin(2 * t2 * w0)
    delay_part = t1 * (gp - gm) + t2 * (gp + gm) - 2 * t2 * g2
    bracket = a * delay_part - 4 * (env + es) * (w0 * s - 2 * t2 * O1**2 * c)
    tail = (
        gp * a * (1 - (t1 + t2) ** 2 * a)
        + gm * a * (1 - (t1 - t2) ** 2 * a)
        + 6 * (4 * w0**2 + 4 * O1**2 + a)
        + 2 * g2 * a * (t2**2 * a - 1)
        + 6 * exp(-(t1**2) * a / 2) * (4 * w0**2 + 4 * O1**2 - a + t1**2 * a**2)
        - 8 * (env + es) * ((4 * t2**2 * O1**4 - w0**2 - O1**2) * c + 4 * t2 * w0 * O1**2 * s)
    )
    return _out(tail / 16 - bracket**2 / 256)


def h12_regrouped(tau1, tau2, params: GaussianJsaParams):
    t1, t2 = np.asarray(tau1, float), np.asarray(tau2, float)
    w0, O1, a, gp, gm, g2, es, env = _shared(t1, t2, params)
    c, s = cos(2 * t2 * w0), sin(2 * t2 * w0)
    osc = 2 * t2 * O1**2 * c + w0 * s
    left = gp * (t1 + t2) + gm * (t1 - t2) + 2 * t1 * env * c
    right = a * (t1 * (gp - gm) + t2 * (gp + gm) - 2 * t2 * g2) + 4 * (es + env) * osc
    hyper = -t1 * t2 * a * (gm + gp) + ((t1**2 + t2**2) * a - 1) * (gm - gp) / 2
    return _out(a / 256 * (-64 * t1 * env * osc + left * right + 32 * hyper))


def coincidence_regrouped(tau1, tau2, theta2, params: GaussianJsaParams):
    t1, t2 = np.asarray(tau1, float), np.asarray(tau2, float)
    w0, O1, a, gp, gm, g2, es, env = _shared(t1, t2, params)
    return _out((4 - gm - gp + 2 * g2 + 2 * (env + es) * cos(2 * t2 * w0 + 2 * theta2)) / 8)
