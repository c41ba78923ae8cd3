"""Fixed-step ODE integration shared by the master-equation oracles"""
from typing import Callable, Sequence

import numpy as np

from ..utils import validation_error

Derivative = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(f: Derivative, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_integrate(f: Derivative, y0: np.ndarray, t0: float, t1: float, h: float = 1e-3) -> np.ndarray:
    """
    Classic fourth-order Runge-Kutta from t0 to t1.

    The step is shrunk so that an integer number of steps lands exactly on t1.
    Works for real or complex arrays of any shape.
    """
    if h <= 0:
        raise validation_error(f"step size must be positive, got {h!r}", "h")
    if t1 < t0:
        raise validation_error(f"t1={t1!r} precedes t0={t0!r}", "t1")
    y = np.array(y0, dtype=np.result_type(y0, float), copy=True)
    if t1 == t0:
        return y
    n_steps = max(1, int(np.ceil((t1 - t0) / h - 1e-9)))
    step = (t1 - t0) / n_steps
    t = t0
    for i in range(n_steps):
        y = rk4_step(f, t, y, step)
        t = t0 + (i + 1) * step
    return y


def rk4_trajectory(f: Derivative, y0: np.ndarray, times: Sequence[float], h: float = 1e-3) -> np.ndarray:
    """States at each of the (increasing) sample times, stacked along axis 0"""
    ts = np.asarray(times, dtype=float)
    if np.any(np.diff(ts) < 0):
        raise validation_error("sample times must be non-decreasing", "times")
    out = np.empty((ts.size,) + np.shape(y0), dtype=np.result_type(y0, float))
    y, t_prev = np.asarray(y0), float(ts[0])
    out[0] = y
    for i in range(1, ts.size):
        y = rk4_integrate(f, y, t_prev, float(ts[i]), h)
        out[i] = y
        t_prev = float(ts[i])
    return out
