"""Closed-form solutions used as oracles for the RK4 integrator.

All formulas hold for the working point omega = 0, lam = mu = 1, gamma = 1 of
the inefficient-detection feedback model, with time in units of the inverse
collective decay rate.
"""

from __future__ import annotations

import numpy as np

from .operators import SymXState

__all__ = [
    "ee_closed_form",
    "eegg_minus_concurrence",
    "gg_closed_form",
    "steady_concurrence",
]


def _check_time(t: float) -> float:
    t = float(t)
    if not (np.isfinite(t) and t >= 0.0):
        raise ValueError(f"time must be nonnegative, got {t}")
    return t


def ee_closed_form(t: float, eta: float) -> SymXState:
    """X-form solution at time t for the initial state |ee>.

    Valid for eta strictly inside (0, 1): the printed a(t) and e(t) carry
    removable (eta - 1) singularities, so the eta = 1 curve is obtained from
    the integrator instead of from an analytic limit.
    """
    t = _check_time(t)
    eta = float(eta)
    if not (0.0 < eta < 1.0):
        raise ValueError(
            f"ee_closed_form requires eta in (0, 1), got {eta}; "
            "use the RK4 integrator for eta = 1")
    decay = np.exp(-2.0 * t)
    bracket = (6.0 * np.exp(2.0 * t) * (-1.0 + eta) ** 3
               - 16.0 * np.exp(t - t / eta) * (-2.0 + eta) * eta ** 2
               + np.exp(4.0 * t * (-1.0 + eta) / eta) * (-3.0 + eta) * eta * (1.0 + eta)
               + 3.0 * (-2.0 + eta) * (1.0 + eta) * (-1.0 + 3.0 * eta))
    a = decay * bracket / (6.0 * (-2.0 + eta) * (-1.0 + eta) ** 2)
    b = decay
    # expm1 form of 2*eta*e^{-2t}(e^{t(eta-1)/eta} - 1)/(eta - 1); avoids the
    # cancellation in the raw expression as eta -> 1.
    e = 2.0 * eta * decay * np.expm1(t * (eta - 1.0) / eta) / (eta - 1.0)
    return SymXState(a=a, b=b, e=e)


def gg_closed_form(t: float, eta: float) -> SymXState:
    """X-form solution at time t for the initial state |gg>.

    Valid for eta in (0, 1].  a(t) relaxes monotonically from 1 to the
    asymptote (1 - eta)/(2 - eta); b and e stay identically zero.
    """
    t = _check_time(t)
    eta = float(eta)
    if not (0.0 < eta <= 1.0):
        raise ValueError(f"gg_closed_form requires eta in (0, 1], got {eta}")
    a = (-1.0 - np.exp(2.0 * t * (-2.0 + eta) / eta) + eta) / (-2.0 + eta)
    return SymXState(a=a, b=0.0, e=0.0)


def steady_concurrence(eta: float) -> float:
    """Long-time concurrence 1/(2 - eta) reached from |ee> and |gg>."""
    eta = float(eta)
    if not (0.0 < eta <= 1.0):
        raise ValueError(f"steady_concurrence requires eta in (0, 1], got {eta}")
    return 1.0 / (2.0 - eta)


def eegg_minus_concurrence(t: float) -> float:
    """Concurrence at time t from (|ee> - |gg>)/sqrt(2) at perfect detection.

    Evaluates max[0, C1, C2] with

        C1 = e^{-2t} [-1 + 2t - 2t^2 + e^{2t} - |1 - 2t|]
        C2 = e^{-2t} |2t - 1| - [1 - e^{-2t}/2 - e^{-2t}(1 - 2t)^2 / 2]

    The |1 - 2t| terms give the derivative discontinuity at t = 1/2 while the
    value itself stays continuous.
    """
    t = _check_time(t)
    decay = np.exp(-2.0 * t)
    kink = abs(1.0 - 2.0 * t)
    c1 = decay * (-1.0 + 2.0 * t - 2.0 * t * t + np.exp(2.0 * t) - kink)
    c2 = decay * kink - (1.0 - 0.5 * decay - 0.5 * decay * (1.0 - 2.0 * t) ** 2)
    return max(0.0, c1, c2)
