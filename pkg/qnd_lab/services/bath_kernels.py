"""
Bath kernels for an Ohmic squeezed thermal reservoir

The reduced density matrix of a QND-coupled system evolves as
    rho_nm(t) = exp(-i(E_n - E_m)t) exp(+i(E_n^2 - E_m^2) eta(t)) exp(-(E_n - E_m)^2 gamma(t)) rho_nm(0)
so everything the bath does is carried by the phase kernel eta(t) and the decay kernel gamma(t).

Units: hbar = k_B = 1 throughout.
"""
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterable, Sequence, Union

import numpy as np
import pandas as pd
from scipy import integrate
from loguru import logger

from ..core.config import settings
from ..models.bath_models import BathSpec, TemperatureMode, KernelSample, LongTimeLimits
from ..utils import domain_error, numerical_error, validation_error

TimeLike = Union[float, np.ndarray]

# below this value of beta*omega coth(beta*omega/2) is replaced by its series
COTH_SERIES_CUTOFF = 1e-4
# beyond this many panels of width min(2 pi / t, omega_c) the weighted oscillatory rule takes over
MAX_PANELS = 400


class ThermalFactor(str, Enum):
    """Treatment of coth(beta omega / 2) inside the gamma integrals"""
    ZERO = "zero"    # coth -> 1
    HIGH = "high"    # coth -> 2 / (beta omega)
    EXACT = "exact"  # full coth


@dataclass(frozen=True)
class OscillatoryTerm:
    """coefficient * weight(frequency * omega), weight being "sin" or "cos"; frequency >= 0"""
    coefficient: float
    weight: str
    frequency: float


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error: float
    tail_bound: float
    n_panels: int
    converged: bool


def ohmic_spectral_density(omega: TimeLike, spec: BathSpec) -> TimeLike:
    """I(w) = (gamma0/pi) w exp(-w/omega_c)"""
    w = np.asarray(omega, dtype=float)
    out = spec.gamma0 / np.pi * w * np.exp(-w / spec.omega_c)
    return float(out) if out.ndim == 0 else out


def _as_times(t: TimeLike) -> np.ndarray:
    ts = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(ts)):
        raise validation_error("time must be finite", "t")
    if np.any(ts < 0):
        raise validation_error(f"time must be non-negative, got {ts.min()!r}", "t")
    return ts


def _out(arr: np.ndarray) -> TimeLike:
    return float(arr) if arr.ndim == 0 else arr


def check_closed_form_domain(ts: np.ndarray, spec: BathSpec):
    if spec.a > 0 and np.any(ts <= 2 * spec.a):
        raise domain_error(
            f"closed-form kernels hold only for t > 2a = {2 * spec.a!r}; "
            f"use temperature_mode=exact for earlier times",
            t_min=float(ts.min()), two_a=2 * spec.a
        )


@lru_cache(maxsize=128)
def high_temperature_diagnostic(spec: BathSpec) -> bool:
    """Warn (once per spec) when mode high is used below 10 hbar omega_c"""
    if spec.temperature_mode != TemperatureMode.HIGH:
        return False
    if spec.T < settings.HIGH_T_WARN_RATIO * spec.omega_c:
        logger.warning(
            f"temperature_mode=high with k_B T = {spec.T} < {settings.HIGH_T_WARN_RATIO} hbar omega_c "
            f"= {settings.HIGH_T_WARN_RATIO * spec.omega_c}; the high-T closed forms may be inaccurate, "
            f"consider temperature_mode=exact"
        )
        return True
    return False


# ---------------------------------------------------------------------------
# eta
# ---------------------------------------------------------------------------

def eta(t: TimeLike, spec: BathSpec) -> TimeLike:
    """eta(t) = -(gamma0/pi) arctan(omega_c t); independent of r, a and T"""
    ts = _as_times(t)
    return _out(-spec.gamma0 / np.pi * np.arctan(spec.omega_c * ts))


def eta_dot(t: TimeLike, spec: BathSpec) -> TimeLike:
    ts = _as_times(t)
    wc = spec.omega_c
    return _out(-spec.gamma0 / np.pi * wc / (1.0 + (wc * ts) ** 2))


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def _gamma_zero(ts: np.ndarray, spec: BathSpec) -> np.ndarray:
    g0, wc, a = spec.gamma0, spec.omega_c, spec.a
    sh = math.sinh(2 * spec.r)
    out = g0 / (2 * np.pi) * math.cosh(2 * spec.r) * np.log1p((wc * ts) ** 2)
    if sh != 0.0:
        out = out - g0 / (4 * np.pi) * sh * (
            np.log1p(4 * wc ** 2 * (ts - a) ** 2)
            - 2 * np.log1p(wc ** 2 * (ts - 2 * a) ** 2)
            + math.log1p(4 * a ** 2 * wc ** 2)
        )
    return out


def _gamma_dot_zero(ts: np.ndarray, spec: BathSpec) -> np.ndarray:
    g0, wc, a = spec.gamma0, spec.omega_c, spec.a
    sh = math.sinh(2 * spec.r)
    out = g0 / np.pi * math.cosh(2 * spec.r) * wc ** 2 * ts / (1 + wc ** 2 * ts ** 2)
    if sh != 0.0:
        out = out - g0 / (4 * np.pi) * sh * (
            8 * wc ** 2 * (ts - a) / (1 + 4 * wc ** 2 * (ts - a) ** 2)
            - 4 * wc ** 2 * (ts - 2 * a) / (1 + wc ** 2 * (ts - 2 * a) ** 2)
        )
    return out


def ramp_integral(b: TimeLike, wc: float) -> TimeLike:
    """F(b) = int_0^inf exp(-w/wc)(1 - cos(b w))/w^2 dw = b arctan(wc b) - ln(1 + wc^2 b^2)/(2 wc)"""
    return b * np.arctan(wc * b) - np.log1p((wc * b) ** 2) / (2 * wc)


def _gamma_high(ts: np.ndarray, spec: BathSpec) -> np.ndarray:
    g0, wc, a, T = spec.gamma0, spec.omega_c, spec.a, spec.T
    sh = math.sinh(2 * spec.r)
    out = 2 * g0 * T / np.pi * math.cosh(2 * spec.r) * ramp_integral(ts, wc)
    if sh != 0.0:
        out = out - g0 * T / np.pi * sh * (
            ramp_integral(2 * (ts - a), wc) - 2 * ramp_integral(ts - 2 * a, wc) + ramp_integral(2 * a, wc)
        )
    return out


def _gamma_dot_high(ts: np.ndarray, spec: BathSpec) -> np.ndarray:
    g0, wc, a, T = spec.gamma0, spec.omega_c, spec.a, spec.T
    sh = math.sinh(2 * spec.r)
    pref = 2 * g0 * T / np.pi
    out = pref * math.cosh(2 * spec.r) * np.arctan(wc * ts)
    if sh != 0.0:
        out = out - pref * sh * (np.arctan(2 * wc * (ts - a)) - np.arctan(wc * (ts - 2 * a)))
    return out


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def _thermal_factor(kind: ThermalFactor, T: float) -> Callable[[float], float]:
    if kind == ThermalFactor.ZERO:
        return lambda w: 1.0
    if T <= 0:
        raise validation_error(f"thermal factor {kind.value} needs T > 0", "T")
    if kind == ThermalFactor.HIGH:
        return lambda w: 2.0 * T / w

    def coth_half(w: float) -> float:
        x = w / T
        if x < COTH_SERIES_CUTOFF:
            return 2.0 / x + x / 6.0
        return 1.0 / math.tanh(0.5 * x)
    return coth_half


def _omega_max(spec: BathSpec) -> float:
    return spec.omega_c * max(40.0, math.log(1.0 / settings.QUAD_EPS_ABS))


def _quad(g: Callable[[float], float], lo: float, hi: float, epsabs: float, **weighting):
    """One quad call; converged is False when QUADPACK returns a message"""
    res = integrate.quad(g, lo, hi, epsabs=epsabs, epsrel=settings.QUAD_EPS_REL,
                         limit=settings.QUAD_LIMIT, full_output=1, **weighting)
    return res[0], res[1], len(res) <= 3


def _integrate(f: Callable[[float], float], omega_max: float, t_scale: float, wc: float,
               envelope: Callable[[float], float] = None,
               terms: Sequence[OscillatoryTerm] = ()) -> QuadratureResult:
    """
    Adaptive quadrature on [0, omega_max], split into panels no wider than min(2 pi / t, omega_c).

    When that needs more than MAX_PANELS panels and the integrand is given as envelope * sum(terms),
    only the first panel is integrated directly; the rest uses QUADPACK's weighted rule per term.
    """
    width = wc if t_scale <= 0 else min(wc, 2 * np.pi / t_scale)
    needed = max(1, math.ceil(omega_max / width))
    if needed > MAX_PANELS and envelope is not None:
        return _integrate_weighted(f, envelope, terms, omega_max, width)
    n_panels = min(needed, MAX_PANELS)
    edges = np.linspace(0.0, omega_max, n_panels + 1)
    total, err, converged = 0.0, 0.0, True
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, abs_err, ok = _quad(f, lo, hi, settings.QUAD_EPS_ABS / n_panels)
        total += value
        err += abs_err
        converged = converged and ok
    return QuadratureResult(total, err, 0.0, n_panels, converged)


def _integrate_weighted(f: Callable[[float], float], envelope: Callable[[float], float],
                        terms: Sequence[OscillatoryTerm], omega_max: float, split: float) -> QuadratureResult:
    eps = settings.QUAD_EPS_ABS / (len(terms) + 1)
    total, err, converged = _quad(f, 0.0, split, eps)
    for term in terms:
        if term.frequency == 0.0 and term.weight == "sin":
            continue
        if term.frequency == 0.0:
            value, abs_err, ok = _quad(envelope, split, omega_max, eps)
        else:
            value, abs_err, ok = _quad(envelope, split, omega_max, eps, weight=term.weight, wvar=term.frequency)
        total += term.coefficient * value
        err += abs(term.coefficient) * abs_err
        converged = converged and ok
    return QuadratureResult(total, err, 0.0, 1 + len(terms), converged)


def _finalize(res: QuadratureResult, tail: float, what: str, t: float) -> QuadratureResult:
    achieved = res.abs_error + tail
    tolerance = max(1e3 * settings.QUAD_EPS_ABS, 1e-7 * abs(res.value))
    if not math.isfinite(res.value):
        raise numerical_error(f"{what} quadrature produced a non-finite value at t={t!r}")
    if not res.converged and achieved > tolerance:
        raise numerical_error(
            f"{what} quadrature did not converge at t={t!r}",
            achieved_tolerance=achieved, requested_tolerance=tolerance
        )
    logger.debug(f"{what} quadrature t={t:.6g}: value={res.value:.12g} err={res.abs_error:.2e} tail<={tail:.2e} panels={res.n_panels}")
    return QuadratureResult(res.value, achieved, tail, res.n_panels, res.converged)


def _checked(f: Callable[[float], float]) -> Callable[[float], float]:
    def g(w: float) -> float:
        v = f(w)
        if not math.isfinite(v):
            raise numerical_error(f"singular integrand evaluation at omega={w!r}")
        return v
    return g


def _term(coefficient: float, weight: str, frequency: float) -> OscillatoryTerm:
    if frequency < 0:
        # sin is odd, cos is even
        return OscillatoryTerm(-coefficient if weight == "sin" else coefficient, weight, -frequency)
    return OscillatoryTerm(coefficient, weight, frequency)


def _default_factor(spec: BathSpec) -> ThermalFactor:
    return ThermalFactor(spec.temperature_mode.value)


def gamma_quadrature_result(t: float, spec: BathSpec, thermal_factor: ThermalFactor = None) -> QuadratureResult:
    """
    gamma(t) = 1/2 int_0^inf I(w)/w^2 coth(w/2T) |(e^{iwt}-1)cosh r + (e^{-iwt}-1) sinh r e^{2iaw}|^2 dw

    The modulus is evaluated as 4 sin^2(wt/2) [cosh 2r - sinh 2r cos(w(t - 2a))], which stays
    accurate as w -> 0 where the 1/w^2 and coth poles cancel against sin^2.
    """
    t = float(_as_times(t))
    kind = ThermalFactor(thermal_factor) if thermal_factor is not None else _default_factor(spec)
    if t == 0.0:
        return QuadratureResult(0.0, 0.0, 0.0, 0, True)
    g0, wc, a = spec.gamma0, spec.omega_c, spec.a
    ch, sh = math.cosh(2 * spec.r), math.sinh(2 * spec.r)
    factor = _thermal_factor(kind, spec.T)
    pref = g0 / math.pi

    def f(w: float) -> float:
        if w == 0.0:
            # limit of factor(w) * 2 sin^2(wt/2)/w
            if kind == ThermalFactor.ZERO:
                return 0.0
            return pref * spec.T * t * t * (ch - sh)
        s = math.sin(0.5 * w * t)
        return pref * math.exp(-w / wc) * factor(w) * 2.0 * s * s / w * (ch - sh * math.cos(w * (t - 2 * a)))

    def envelope(w: float) -> float:
        return pref * math.exp(-w / wc) * factor(w) / w

    # 2 sin^2(wt/2) [ch - sh cos(w tau)] expanded into single frequencies, tau = t - 2a
    tau = t - 2 * a
    terms = [_term(ch, "cos", 0.0), _term(-ch, "cos", t), _term(-sh, "cos", tau),
             _term(0.5 * sh, "cos", t + tau), _term(0.5 * sh, "cos", 2 * a)]
    omega_max = _omega_max(spec)
    res = _integrate(_checked(f), omega_max, max(t, abs(t - 2 * a)), wc, envelope, terms)
    c_max = factor(omega_max)
    tail = pref * c_max * 2.0 * (ch + abs(sh)) / omega_max * wc * math.exp(-omega_max / wc)
    return _finalize(res, tail, "gamma", t)


def gamma_quadrature(t: float, spec: BathSpec, thermal_factor: ThermalFactor = None) -> float:
    return gamma_quadrature_result(t, spec, thermal_factor).value


def gamma_dot_quadrature_result(t: float, spec: BathSpec, thermal_factor: ThermalFactor = None) -> QuadratureResult:
    """Time derivative of gamma(t), differentiated under the integral sign"""
    t = float(_as_times(t))
    kind = ThermalFactor(thermal_factor) if thermal_factor is not None else _default_factor(spec)
    g0, wc, a = spec.gamma0, spec.omega_c, spec.a
    ch, sh = math.cosh(2 * spec.r), math.sinh(2 * spec.r)
    factor = _thermal_factor(kind, spec.T)
    pref = g0 / math.pi

    def f(w: float) -> float:
        if w == 0.0:
            if kind == ThermalFactor.ZERO:
                return 0.0
            # 2T/w * [w t (ch - sh) + O(w^2)]
            return pref * 2.0 * spec.T * t * (ch - sh)
        s = math.sin(0.5 * w * t)
        u = w * (t - 2 * a)
        bracket = math.sin(w * t) * (ch - sh * math.cos(u)) + 2.0 * s * s * sh * math.sin(u)
        return pref * math.exp(-w / wc) * factor(w) * bracket

    def envelope(w: float) -> float:
        return pref * math.exp(-w / wc) * factor(w)

    # bracket = ch sin(wt) - sh sin(w(t + tau)) + sh sin(w tau)
    tau = t - 2 * a
    terms = [_term(ch, "sin", t), _term(-sh, "sin", t + tau), _term(sh, "sin", tau)]
    omega_max = _omega_max(spec)
    res = _integrate(_checked(f), omega_max, max(t, abs(t - 2 * a), 2 * abs(t - a)), wc, envelope, terms)
    tail = pref * factor(omega_max) * (ch + 3 * abs(sh)) * wc * math.exp(-omega_max / wc)
    return _finalize(res, tail, "gamma_dot", t)


def gamma_dot_quadrature(t: float, spec: BathSpec, thermal_factor: ThermalFactor = None) -> float:
    return gamma_dot_quadrature_result(t, spec, thermal_factor).value


def eta_quadrature(t: float, spec: BathSpec) -> float:
    """eta(t) = -int_0^inf I(w)/w^2 sin(wt) dw, for cross-checking the arctan closed form"""
    t = float(_as_times(t))
    if t == 0.0:
        return 0.0
    wc, pref = spec.omega_c, spec.gamma0 / math.pi

    def f(w: float) -> float:
        if w == 0.0:
            return -pref * t
        return -pref * math.exp(-w / wc) * math.sin(w * t) / w

    def envelope(w: float) -> float:
        return pref * math.exp(-w / wc) / w

    omega_max = _omega_max(spec)
    res = _integrate(_checked(f), omega_max, t, wc, envelope, [_term(-1.0, "sin", t)])
    tail = pref * wc / omega_max * math.exp(-omega_max / wc)
    return _finalize(res, tail, "eta", t).value


# ---------------------------------------------------------------------------
# Public kernels
# ---------------------------------------------------------------------------

def _map_quadrature(fn: Callable[[float, BathSpec], float], ts: np.ndarray, spec: BathSpec) -> np.ndarray:
    flat = np.array([fn(float(x), spec) for x in ts.ravel()])
    return flat.reshape(ts.shape)


def gamma(t: TimeLike, spec: BathSpec) -> TimeLike:
    """Decay kernel gamma(t) for the bath's temperature mode"""
    ts = _as_times(t)
    mode = spec.temperature_mode
    if mode == TemperatureMode.EXACT:
        return _out(_map_quadrature(gamma_quadrature, ts, spec))
    check_closed_form_domain(ts, spec)
    if mode == TemperatureMode.ZERO:
        return _out(_gamma_zero(ts, spec))
    high_temperature_diagnostic(spec)
    return _out(_gamma_high(ts, spec))


def gamma_dot(t: TimeLike, spec: BathSpec) -> TimeLike:
    """Decoherence rate d gamma / dt"""
    ts = _as_times(t)
    mode = spec.temperature_mode
    if mode == TemperatureMode.EXACT:
        return _out(_map_quadrature(gamma_dot_quadrature, ts, spec))
    check_closed_form_domain(ts, spec)
    if mode == TemperatureMode.ZERO:
        return _out(_gamma_dot_zero(ts, spec))
    high_temperature_diagnostic(spec)
    return _out(_gamma_dot_high(ts, spec))


def longtime_limits(spec: BathSpec) -> LongTimeLimits:
    """
    Asymptotes of the kernels.

    At T = 0 the rate decays as gamma_dot ~ gamma0 [cosh 2r + sinh(2r)/2] / (pi t); the sinh part
    comes from the constant term of Re[(e^{iwt}-1)^2 e^{-2iaw}] and reduces to gamma0/(pi t) at r = 0.
    In mode high, omega_c -> infinity gives gamma(t) -> gamma0 T cosh(2r) t - 2 gamma0 T sinh(2r) a.
    """
    g0 = spec.gamma0
    ch, sh = math.cosh(2 * spec.r), math.sinh(2 * spec.r)
    limits = dict(
        eta_inf=-g0 / 2,
        zero_t_rate_coefficient=g0 * (ch + 0.5 * sh) / math.pi,
    )
    if spec.temperature_mode == TemperatureMode.HIGH:
        T = spec.T
        limits.update(
            high_t_slope=g0 * T * ch,
            high_t_offset=-2 * g0 * T * sh * spec.a,
            gamma_dot_inf=g0 * T * ch,
        )
    return LongTimeLimits(**limits)


def sample(t: float, spec: BathSpec) -> KernelSample:
    return KernelSample(
        t=float(t),
        eta=eta(t, spec),
        eta_dot=eta_dot(t, spec),
        gamma=gamma(t, spec),
        gamma_dot=gamma_dot(t, spec),
    )


def sample_grid(ts: Iterable[float], spec: BathSpec) -> pd.DataFrame:
    """Kernel table with columns t, eta, eta_dot, gamma, gamma_dot"""
    times = np.asarray(list(ts), dtype=float)
    return pd.DataFrame({
        't': times,
        'eta': np.atleast_1d(eta(times, spec)),
        'eta_dot': np.atleast_1d(eta_dot(times, spec)),
        'gamma': np.atleast_1d(gamma(times, spec)),
        'gamma_dot': np.atleast_1d(gamma_dot(times, spec)),
    })
