"""
QND coupling to a bath of two-level systems

    H = H_S + sum_k omega_k sigma_zk + H_S sum_k C_k sigma_xk

For system level E the k-th bath spin precesses at omega'_k(E) = sqrt(omega_k^2 + E^2 C_k^2).
"""
import math
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import special
from loguru import logger

from ..models.bath_models import SpinBathSpec
from ..models.system_models import EnergyBasisDensityMatrix, SystemSpectrum
from ..utils import validation_error
from .operators import PAULI_X, PAULI_Z, embed, hermitian_propagator, kron_all, partial_trace_bath
from .qnd_dynamics import require_density_matrix


def omega_prime(E: float, mode_index: int, spec: SpinBathSpec) -> float:
    if not 0 <= mode_index < spec.n_modes:
        raise validation_error(f"mode index {mode_index} outside 0..{spec.n_modes - 1}", "mode_index")
    mode = spec.modes[mode_index]
    return math.hypot(mode.omega, E * mode.C)


def _check(rho0: EnergyBasisDensityMatrix, t: float, spectrum: SystemSpectrum):
    if not (math.isfinite(t) and t >= 0):
        raise validation_error(f"time must be finite and non-negative, got {t!r}", "t")
    if rho0.dimension != spectrum.dimension:
        raise validation_error(
            f"state dimension {rho0.dimension} does not match spectrum dimension {spectrum.dimension}", "spectrum"
        )
    require_density_matrix(rho0)


def _polarizations(spec: SpinBathSpec, polarizations: Optional[Sequence[float]]) -> np.ndarray:
    if polarizations is None:
        return np.zeros(spec.n_modes)
    z = np.asarray(polarizations, dtype=float)
    if z.shape != (spec.n_modes,):
        raise validation_error(f"expected {spec.n_modes} polarizations, got {z.size}", "polarizations")
    if np.any(np.abs(z) > 1):
        raise validation_error("polarizations <sigma_z> must lie in [-1, 1]", "polarizations")
    return z


def overlap_factor(n: int, m: int, t: float, spec: SpinBathSpec, spectrum: SystemSpectrum,
                   polarizations: Optional[Sequence[float]] = None) -> np.ndarray:
    """
    Per-mode factors Tr[rho_k exp(i h_k(E_m) t) exp(-i h_k(E_n) t)] for bath spins diagonal in sigma_z.

    With polarizations z_k = <sigma_zk> omitted (z = 0) this is the familiar
        cos(w'_m t) cos(w'_n t) + sin(w'_m t) sin(w'_n t) (w^2 + E_m E_n C^2) / (w'_m w'_n)
    Nonzero z adds i w z [cos(w'_n t) sin(w'_m t)/w'_m - cos(w'_m t) sin(w'_n t)/w'_n].
    """
    z = _polarizations(spec, polarizations)
    En, Em = spectrum.energies[n], spectrum.energies[m]
    factors = np.empty(spec.n_modes, dtype=complex)
    for k, mode in enumerate(spec.modes):
        wn, wm = omega_prime(En, k, spec), omega_prime(Em, k, spec)
        cn, sn = math.cos(wn * t), math.sin(wn * t)
        cm, sm = math.cos(wm * t), math.sin(wm * t)
        overlap = (mode.omega ** 2 + Em * En * mode.C ** 2) / (wm * wn)
        value = complex(cm * cn + sm * sn * overlap)
        if z[k] != 0.0:
            value += 1j * mode.omega * z[k] * (cn * sm / wm - cm * sn / wn)
        factors[k] = value
    return factors


def reduced_density_polarized_spin_bath(rho0: EnergyBasisDensityMatrix, t: float, spec: SpinBathSpec,
                                        spectrum: SystemSpectrum,
                                        polarizations: Optional[Sequence[float]] = None) -> EnergyBasisDensityMatrix:
    """Reduced dynamics for any product bath state diagonal in sigma_z"""
    _check(rho0, t, spectrum)
    z = _polarizations(spec, polarizations)
    E = spectrum.as_array()
    dim = spectrum.dimension
    out = np.array(rho0.entries, dtype=complex)
    for n in range(dim):
        for m in range(dim):
            if n == m:
                continue
            # fixed left-to-right product over modes
            bath = complex(1.0)
            for f in overlap_factor(n, m, t, spec, spectrum, z):
                bath *= f
            out[n, m] *= np.exp(-1j * (E[n] - E[m]) * t) * bath
    return EnergyBasisDensityMatrix(out)


def reduced_density_spin_bath(rho0: EnergyBasisDensityMatrix, t: float, spec: SpinBathSpec,
                              spectrum: SystemSpectrum) -> EnergyBasisDensityMatrix:
    """
    Product-formula reduced dynamics. No temperature or squeezing parameter enters;
    the result is exact for unpolarized bath states such as the maximally mixed one.
    """
    return reduced_density_polarized_spin_bath(rho0, t, spec, spectrum, None)


# ---------------------------------------------------------------------------
# Exact composite oracle
# ---------------------------------------------------------------------------

def ground_bath_state(spec: SpinBathSpec) -> np.ndarray:
    down = np.diag([0.0, 1.0]).astype(complex)
    return kron_all([down] * spec.n_modes)


def maximally_mixed_bath_state(spec: SpinBathSpec) -> np.ndarray:
    dim = 2 ** spec.n_modes
    return np.eye(dim, dtype=complex) / dim


def thermal_bath_state(spec: SpinBathSpec, T: float) -> np.ndarray:
    """Gibbs state of sum_k omega_k sigma_zk at temperature T"""
    if not T > 0:
        raise validation_error(f"temperature must be positive, got {T!r}", "T")
    factors = []
    for mode in spec.modes:
        p_up = float(special.expit(-2.0 * mode.omega / T))
        factors.append(np.diag([p_up, 1.0 - p_up]).astype(complex))
    return kron_all(factors)


def bath_polarizations(bath_state: np.ndarray, spec: SpinBathSpec) -> np.ndarray:
    """<sigma_zk> for each bath spin"""
    dims = [2] * spec.n_modes
    return np.array([
        float(np.real(np.trace(bath_state @ embed(PAULI_Z, k, dims)))) for k in range(spec.n_modes)
    ])


def composite_hamiltonian(spec: SpinBathSpec, spectrum: SystemSpectrum) -> np.ndarray:
    dims = [2] * spec.n_modes
    bath_dim = 2 ** spec.n_modes
    H_S = np.diag(spectrum.as_array()).astype(complex)
    H_R = sum(mode.omega * embed(PAULI_Z, k, dims) for k, mode in enumerate(spec.modes))
    V = sum(mode.C * embed(PAULI_X, k, dims) for k, mode in enumerate(spec.modes))
    return (
        np.kron(H_S, np.eye(bath_dim))
        + np.kron(np.eye(spectrum.dimension), H_R)
        + np.kron(H_S, V)
    )


def exact_spin_bath_evolution(rho0: EnergyBasisDensityMatrix, t: float, spec: SpinBathSpec,
                              spectrum: SystemSpectrum,
                              bath_state: Optional[np.ndarray] = None) -> EnergyBasisDensityMatrix:
    """Unitary evolution of rho0 x rho_R under the full Hamiltonian, bath traced out"""
    _check(rho0, t, spectrum)
    bath_dim = 2 ** spec.n_modes
    rho_R = maximally_mixed_bath_state(spec) if bath_state is None else np.asarray(bath_state, dtype=complex)
    if rho_R.shape != (bath_dim, bath_dim):
        raise validation_error(f"bath state must be {bath_dim}x{bath_dim}, got {rho_R.shape}", "bath_state")
    U = hermitian_propagator(composite_hamiltonian(spec, spectrum), t)
    total = U @ np.kron(rho0.entries, rho_R) @ U.conj().T
    return EnergyBasisDensityMatrix(partial_trace_bath(total, spectrum.dimension, bath_dim))


def revival_time(E_n: float, E_m: float, spec: SpinBathSpec, max_denominator: int = 1000,
                 tol: float = 1e-12) -> float:
    """
    First t > 0 at which a single-mode coherence factor returns to 1.

    Needs omega'(E_n) / omega'(E_m) rational (within tol) with denominator at most max_denominator.
    """
    if spec.n_modes != 1:
        raise validation_error("revival time is defined for a single bath spin", "modes")
    wn, wm = omega_prime(E_n, 0, spec), omega_prime(E_m, 0, spec)
    ratio = Fraction(wn / wm).limit_denominator(max_denominator)
    if abs(float(ratio) - wn / wm) > tol * (wn / wm):
        raise validation_error(f"precession frequencies {wn!r} and {wm!r} are not commensurate", "modes")
    t_rev = 2 * math.pi * ratio.numerator / wn
    logger.debug(f"Revival at t={t_rev:.12g} for frequency ratio {ratio}")
    return t_rev
