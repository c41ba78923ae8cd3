"""
Reduced dynamics of a system QND-coupled to a squeezed thermal bath.

In the energy eigenbasis every element evolves independently:
    rho_nm(t) = exp(-i dE t) exp(+i d(E^2) eta(t)) exp(-dE^2 gamma(t)) rho_nm(0)
with dE = E_n - E_m and d(E^2) = E_n^2 - E_m^2. Populations never change.
"""
import math
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import special
from loguru import logger

from ..core.config import settings
from ..models.bath_models import BathSpec, TemperatureMode
from ..models.system_models import (
    CoherencePairTerm,
    EnergyBasisDensityMatrix,
    PureState,
    SystemSpectrum,
)
from ..utils import truncation_error, validation_error
from . import bath_kernels
from .integrators import rk4_integrate


def ho_spectrum(omega: float, n_max: int) -> SystemSpectrum:
    """E_n = omega (n + 1/2) for n = 0..n_max"""
    if not omega > 0:
        raise validation_error(f"omega must be positive, got {omega!r}", "omega")
    if n_max < 0:
        raise validation_error(f"n_max must be non-negative, got {n_max!r}", "n_max")
    return SystemSpectrum(energies=[omega * (n + 0.5) for n in range(n_max + 1)])


def two_level_spectrum(omega: float) -> SystemSpectrum:
    """Levels +-omega/2 with the upper level |1> first, matching the Bloch convention"""
    return SystemSpectrum(energies=[0.5 * omega, -0.5 * omega])


def poisson_tail_mass(alpha_sq: float, n_max: int) -> float:
    """P(n > n_max) for a Poisson distribution with mean alpha_sq"""
    if alpha_sq == 0:
        return 0.0
    return float(special.gammainc(n_max + 1, alpha_sq))


def required_n_max(alpha_sq: float, tail_tol: float) -> int:
    n = max(1, int(math.ceil(alpha_sq)))
    while poisson_tail_mass(alpha_sq, n) >= tail_tol:
        n += 1
    return n


def coherent_state_populations(alpha_sq: float, n_max: Optional[int] = None,
                               tail_tol: Optional[float] = None) -> PureState:
    """
    Fock amplitudes of the coherent state |alpha> with alpha = sqrt(alpha_sq) real.

    When n_max is omitted the smallest truncation whose Poisson tail is below tail_tol is used.
    """
    if not (math.isfinite(alpha_sq) and alpha_sq >= 0):
        raise validation_error(f"alpha_sq must be finite and non-negative, got {alpha_sq!r}", "alpha_sq")
    tol = settings.TAIL_MASS_TOL if tail_tol is None else tail_tol
    if n_max is None:
        n_max = required_n_max(alpha_sq, tol)
    elif n_max < 1:
        raise validation_error(f"n_max must be at least 1, got {n_max!r}", "n_max")
    tail = poisson_tail_mass(alpha_sq, n_max)
    if tail >= tol:
        needed = required_n_max(alpha_sq, tol)
        raise truncation_error(
            f"n_max={n_max} leaves Poisson tail mass {tail:.3e}; need n_max >= {needed}",
            defect=tail, tolerance=tol, required_n_max=needed
        )

    n = np.arange(n_max + 1)
    if alpha_sq == 0:
        amps = np.zeros(n_max + 1)
        amps[0] = 1.0
    else:
        log_w = -alpha_sq + n * math.log(alpha_sq) - special.gammaln(n + 1)
        amps = np.exp(0.5 * log_w)
    amps = amps / math.sqrt(float(np.sum(amps ** 2)))
    logger.debug(f"Coherent state |alpha|^2={alpha_sq}: n_max={n_max}, tail={tail:.2e}")
    return PureState(amps.astype(complex))


def density_from_state(state: PureState) -> EnergyBasisDensityMatrix:
    return EnergyBasisDensityMatrix.from_pure_state(state)


def require_density_matrix(rho: EnergyBasisDensityMatrix, field: str = "rho0"):
    """Raise unless rho is hermitian, unit-trace and positive semidefinite"""
    problems = rho.validation_errors()
    if problems:
        raise validation_error(f"{field} is not a density matrix: {'; '.join(problems)}", field)


def purity(rho: EnergyBasisDensityMatrix) -> float:
    return rho.purity()


def _check_dims(dim: int, spectrum: SystemSpectrum):
    if dim != spectrum.dimension:
        raise validation_error(
            f"state dimension {dim} does not match spectrum dimension {spectrum.dimension}", "spectrum"
        )


def _gaps(spectrum: SystemSpectrum):
    E = spectrum.as_array()
    dE = E[:, None] - E[None, :]
    dE2 = E[:, None] ** 2 - E[None, :] ** 2
    return dE, dE2


def _factor(spectrum: SystemSpectrum, t: float, eta_val: float, gamma_val: float) -> np.ndarray:
    dE, dE2 = _gaps(spectrum)
    return np.exp(-1j * dE * t + 1j * dE2 * eta_val - dE ** 2 * gamma_val)


def evolve_with_kernels(rho0: EnergyBasisDensityMatrix, t: float, eta_val: float, gamma_val: float,
                        spectrum: SystemSpectrum) -> EnergyBasisDensityMatrix:
    """Apply the QND propagator for externally supplied kernel values"""
    _check_dims(rho0.dimension, spectrum)
    require_density_matrix(rho0)
    return EnergyBasisDensityMatrix(rho0.entries * _factor(spectrum, t, eta_val, gamma_val))


def evolve_density(rho0: EnergyBasisDensityMatrix, t: float, spec: BathSpec,
                   spectrum: SystemSpectrum) -> EnergyBasisDensityMatrix:
    _check_dims(rho0.dimension, spectrum)
    return evolve_with_kernels(rho0, t, bath_kernels.eta(t, spec), bath_kernels.gamma(t, spec), spectrum)


def propagate_interval(rho_t1: EnergyBasisDensityMatrix, t1: float, t2: float, spec: BathSpec,
                       spectrum: SystemSpectrum) -> EnergyBasisDensityMatrix:
    """Carry rho(t1) to rho(t2) using kernel differences"""
    if t2 < t1:
        raise validation_error(f"t2={t2!r} precedes t1={t1!r}", "t2")
    require_density_matrix(rho_t1, "rho_t1")
    d_eta = bath_kernels.eta(t2, spec) - bath_kernels.eta(t1, spec)
    d_gamma = bath_kernels.gamma(t2, spec) - bath_kernels.gamma(t1, spec)
    return evolve_with_kernels(rho_t1, t2 - t1, d_eta, d_gamma, spectrum)


def master_rhs_array(rho: np.ndarray, t: float, spec: BathSpec, spectrum: SystemSpectrum) -> np.ndarray:
    dE, dE2 = _gaps(spectrum)
    rate = -1j * dE + 1j * bath_kernels.eta_dot(t, spec) * dE2 - dE ** 2 * bath_kernels.gamma_dot(t, spec)
    return rate * rho


def master_rhs(rho: EnergyBasisDensityMatrix, t: float, spec: BathSpec,
               spectrum: SystemSpectrum) -> EnergyBasisDensityMatrix:
    """Elementwise time derivative of rho at time t; the diagonal is identically zero"""
    _check_dims(rho.dimension, spectrum)
    require_density_matrix(rho, "rho")
    return EnergyBasisDensityMatrix(master_rhs_array(rho.entries, t, spec, spectrum))


def integrate_master_equation(rho0: EnergyBasisDensityMatrix, t: float, spec: BathSpec,
                              spectrum: SystemSpectrum, h: float = 1e-3) -> EnergyBasisDensityMatrix:
    """RK4 solution of the master equation from 0 to t"""
    _check_dims(rho0.dimension, spectrum)
    require_density_matrix(rho0)
    y = rk4_integrate(lambda s, y: master_rhs_array(y, s, spec, spectrum), rho0.entries, 0.0, t, h)
    return EnergyBasisDensityMatrix(y)


# ---------------------------------------------------------------------------
# Coherence measure and linear entropy
# ---------------------------------------------------------------------------

def _pair_weights(state: PureState, spectrum: SystemSpectrum):
    _check_dims(state.dimension, spectrum)
    w = state.populations
    dE, _ = _gaps(spectrum)
    return np.outer(w, w), dE ** 2


def coherence_measure(state: PureState, t: float, spec: BathSpec, spectrum: SystemSpectrum) -> float:
    """C(t) = sum_nm |p_n|^2 |p_m|^2 exp(-2 dE^2 gamma(t)); equals Tr rho(t)^2"""
    weights, dE_sq = _pair_weights(state, spectrum)
    g = bath_kernels.gamma(t, spec)
    return float(np.sum(weights * np.exp(-2.0 * dE_sq * g)))


def linear_entropy(state: PureState, t: float, spec: BathSpec, spectrum: SystemSpectrum) -> float:
    """S(t) = 1 - C(t)"""
    return 1.0 - coherence_measure(state, t, spec, spectrum)


def _closed_log_T0(dE_sq: np.ndarray, t: float, spec: BathSpec) -> np.ndarray:
    # product of powers:
    # (1 + wc^2 t^2)^(-g0 ch dE^2/pi) * [(1 + 4wc^2(t-a)^2)(1 + 4wc^2 a^2) / (1 + wc^2(t-2a)^2)^2]^(g0 sh dE^2/(2 pi))
    g0, wc, a = spec.gamma0, spec.omega_c, spec.a
    ch, sh = math.cosh(2 * spec.r), math.sinh(2 * spec.r)
    base = -g0 * ch / math.pi * math.log1p((wc * t) ** 2)
    squeeze = g0 * sh / (2 * math.pi) * (
        math.log1p(4 * wc ** 2 * (t - a) ** 2) + math.log1p(4 * wc ** 2 * a ** 2)
        - 2 * math.log1p(wc ** 2 * (t - 2 * a) ** 2)
    )
    return dE_sq * (base + squeeze)


def _closed_log_highT(dE_sq: np.ndarray, t: float, spec: BathSpec) -> np.ndarray:
    # exponential terms in b arctan(wc b) and power-law terms in (1 + wc^2 b^2)^(1/(2 wc))
    g0, wc, a, T = spec.gamma0, spec.omega_c, spec.a, spec.T
    ch, sh = math.cosh(2 * spec.r), math.sinh(2 * spec.r)
    k = 4 * g0 * T / math.pi

    def xat(b: float) -> float:
        return b * math.atan(wc * b)

    def lg(b: float) -> float:
        return math.log1p((wc * b) ** 2)

    expo = -k * (ch * xat(t) - 0.5 * sh * (xat(2 * (t - a)) - 2 * xat(t - 2 * a) + xat(2 * a)))
    power = k / (2 * wc) * (ch * lg(t) - 0.5 * sh * (lg(2 * (t - a)) - 2 * lg(t - 2 * a) + lg(2 * a)))
    return dE_sq * (expo + power)


def coherence_log_terms(state: PureState, t: float, spec: BathSpec, spectrum: SystemSpectrum) -> np.ndarray:
    """
    Matrix of log factors L_nm with C(t) = sum_nm |p_n|^2 |p_m|^2 exp(L_nm).

    Modes zero and high use the closed power/exponential forms directly; mode exact falls back
    to -2 dE^2 gamma(t) from quadrature.
    """
    _, dE_sq = _pair_weights(state, spectrum)
    t = float(t)
    if spec.temperature_mode == TemperatureMode.EXACT:
        return -2.0 * dE_sq * bath_kernels.gamma(t, spec)
    if t < 0:
        raise validation_error(f"time must be non-negative, got {t!r}", "t")
    bath_kernels.check_closed_form_domain(np.asarray(t), spec)
    if spec.temperature_mode == TemperatureMode.ZERO:
        return _closed_log_T0(dE_sq, t, spec)
    return _closed_log_highT(dE_sq, t, spec)


def _closed(state: PureState, t: float, spec: BathSpec, spectrum: SystemSpectrum,
            mode: TemperatureMode) -> float:
    if spec.temperature_mode != mode:
        raise validation_error(
            f"closed form requires temperature_mode={mode.value}, got {spec.temperature_mode.value}",
            "temperature_mode"
        )
    weights, _ = _pair_weights(state, spectrum)
    return float(np.sum(weights * np.exp(coherence_log_terms(state, t, spec, spectrum))))


def coherence_closed_T0(state: PureState, t: float, spec: BathSpec, spectrum: SystemSpectrum) -> float:
    """Zero-temperature C(t) as a product of powers; power law (omega_c t)^(-2 g0 dE^2/pi) at r = a = 0"""
    return _closed(state, t, spec, spectrum, TemperatureMode.ZERO)


def coherence_closed_highT(state: PureState, t: float, spec: BathSpec, spectrum: SystemSpectrum) -> float:
    return _closed(state, t, spec, spectrum, TemperatureMode.HIGH)


def dominant_highT_terms(state: PureState, spec: BathSpec, spectrum: SystemSpectrum) -> List[CoherencePairTerm]:
    """
    Leading behaviour of each off-diagonal pair for omega_c t >> 1 and t >> a in mode high.

    The exponential rate is 2 dE^2 g0 T cosh 2r; the power of omega_c t is
    2 dE^2 g0 T (2 cosh 2r + sinh 2r) / (pi omega_c).
    """
    if spec.temperature_mode != TemperatureMode.HIGH:
        raise validation_error("dominant high-T terms need temperature_mode=high", "temperature_mode")
    weights, dE_sq = _pair_weights(state, spectrum)
    g0, wc, a, T = spec.gamma0, spec.omega_c, spec.a, spec.T
    ch, sh = math.cosh(2 * spec.r), math.sinh(2 * spec.r)
    ramp_2a = float(bath_kernels.ramp_integral(2 * a, wc))
    offset_unit = 2 * (2 * g0 * T * ch / (math.pi * wc)
                       + g0 * T * sh / math.pi * (math.pi * a + (1 - math.log(2)) / wc + ramp_2a))
    terms = []
    n_dim = spectrum.dimension
    for n in range(n_dim):
        for m in range(n_dim):
            if n == m or weights[n, m] == 0.0:
                continue
            d2 = float(dE_sq[n, m])
            terms.append(CoherencePairTerm(
                n=n, m=m,
                weight=float(weights[n, m]),
                decay_rate=2 * d2 * g0 * T * ch,
                log_offset=d2 * offset_unit,
                power_exponent=2 * d2 * g0 * T * (2 * ch + sh) / (math.pi * wc),
            ))
    return terms


def coherence_curve(state: PureState, ts: Sequence[float], spec: BathSpec,
                    spectrum: SystemSpectrum) -> pd.DataFrame:
    """Entropy table with columns t, S, C"""
    times = np.asarray(ts, dtype=float)
    weights, dE_sq = _pair_weights(state, spectrum)
    gam = np.atleast_1d(bath_kernels.gamma(times, spec))
    gaps, inverse = np.unique(dE_sq, return_inverse=True)
    grouped = np.bincount(inverse.ravel(), weights=weights.ravel())
    C = np.array([float(np.sum(grouped * np.exp(-2.0 * gaps * g))) for g in gam])
    return pd.DataFrame({'t': times, 'S': 1.0 - C, 'C': C})


# ---------------------------------------------------------------------------
# Regime fits
# ---------------------------------------------------------------------------

def fit_power_law_exponent(ts: Iterable[float], values: Iterable[float]) -> float:
    """Slope of log(values) against log(t)"""
    t = np.asarray(list(ts), dtype=float)
    v = np.asarray(list(values), dtype=float)
    if t.size < 2 or np.any(t <= 0) or np.any(v <= 0):
        raise validation_error("power-law fit needs at least two positive samples", "values")
    return float(np.polyfit(np.log(t), np.log(v), 1)[0])


def fit_exponential_rate(ts: Iterable[float], values: Iterable[float]) -> float:
    """Decay rate k of values ~ exp(-k t)"""
    t = np.asarray(list(ts), dtype=float)
    v = np.asarray(list(values), dtype=float)
    if t.size < 2 or np.any(v <= 0):
        raise validation_error("exponential fit needs at least two positive samples", "values")
    return float(-np.polyfit(t, np.log(v), 1)[0])
