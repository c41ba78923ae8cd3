"""
Brute-force system x bath evolution in truncated Fock spaces

The total Hamiltonian (hbar = 1) is
    H = H_S + sum_k omega_k b_k^+ b_k + H_S sum_k g_k (b_k + b_k^+) + H_S^2 sum_k g_k^2 / omega_k
and the bath starts in the product of squeezed thermal states S(r_k, Phi_k) rho_th S^+(r_k, Phi_k).
The reduced state obtained by exponentiating H and tracing out the modes is compared with the
QND propagator evaluated on the finite-mode kernels.
"""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..core.config import settings
from ..models.bath_models import BathMode, BathSpec, DiscreteBathSpec
from ..models.oracle_models import CompositeReport, CompositeScenario, FockOperator
from ..models.system_models import EnergyBasisDensityMatrix, PureState, SystemSpectrum
from ..utils import QNDLabError, parallel_map, truncation_error, validation_error
from .bath_kernels import ohmic_spectral_density
from .operators import (
    annihilation,
    creation,
    embed,
    expm,
    hermitian_propagator,
    kron_all,
    number,
    partial_trace_bath,
)
from .qnd_dynamics import density_from_state, evolve_with_kernels, require_density_matrix

# extra Fock levels used while exponentiating, dropped afterwards
WORK_PADDING = 20


def _work_dim(n_max: int) -> int:
    return 2 * n_max + WORK_PADDING


def squeeze_generator(r: float, Phi: float, n_max: int) -> np.ndarray:
    """(r/2)(exp(-2i Phi) b^2 - exp(2i Phi) b^+2), so that S^+ b S = b cosh r - b^+ exp(2i Phi) sinh r"""
    b = annihilation(n_max)
    bd = creation(n_max)
    return 0.5 * r * (np.exp(-2j * Phi) * (b @ b) - np.exp(2j * Phi) * (bd @ bd))


def squeeze_matrix(r: float, Phi: float, n_max: int) -> np.ndarray:
    """S(r, Phi) on |0>..|n_max>, cut from the exponential on a padded space"""
    n_work = _work_dim(n_max)
    return expm(squeeze_generator(r, Phi, n_work))[:n_max + 1, :n_max + 1]


def displacement_matrix(alpha: complex, n_max: int) -> FockOperator:
    """
    D(alpha) = exp(alpha b^+ - alpha* b) on |0>..|n_max>.

    The unitarity defect is measured on the lower half of the basis; it is logged when
    |alpha|^2 > n_max / 8 and raised as an error above settings.TRUNCATION_TOL.
    """
    alpha = complex(alpha)
    if abs(alpha) ** 2 > n_max / 8:
        logger.warning(f"displacement |alpha|^2={abs(alpha) ** 2:.3g} is large for n_max={n_max}")
    n_work = _work_dim(n_max)
    gen = alpha * creation(n_work) - np.conj(alpha) * annihilation(n_work)
    D = expm(gen)[:n_max + 1, :n_max + 1]
    interior = n_max // 2 + 1
    gram = D.conj().T @ D
    defect = float(np.max(np.abs(gram[:interior, :interior] - np.eye(interior))))
    if defect > settings.TRUNCATION_TOL:
        raise truncation_error(f"displacement alpha={alpha} not resolved by n_max={n_max}",
                               defect=defect, tolerance=settings.TRUNCATION_TOL)
    return FockOperator(matrix=D, n_max=n_max, truncation_defect=defect)


def thermal_mode(omega: float, T: float, n_max: int) -> FockOperator:
    """(1 - q) q^n with q = exp(-omega/T), renormalized on the truncated space"""
    if T <= 0:
        rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        rho[0, 0] = 1.0
        return FockOperator(matrix=rho, n_max=n_max)
    q = math.exp(-omega / T)
    weights = (1 - q) * q ** np.arange(n_max + 1)
    defect = float(q ** (n_max + 1))
    return FockOperator(matrix=np.diag(weights / weights.sum()).astype(complex), n_max=n_max,
                        truncation_defect=defect)


def check_squeeze_truncation(r: float, n_max: int):
    if r != 0 and n_max < 10 * math.sinh(r) ** 2 + 20:
        raise validation_error(
            f"n_max={n_max} too small for squeezing r={r}; need n_max >= {10 * math.sinh(r) ** 2 + 20:.1f}",
            "n_max"
        )


def squeezed_thermal_mode(omega: float, r: float, Phi: float, T: float, n_max: int) -> FockOperator:
    """S(r, Phi) rho_th S^+(r, Phi) truncated to n_max with unit trace"""
    check_squeeze_truncation(r, n_max)
    n_work = _work_dim(n_max)
    rho_th = thermal_mode(omega, T, n_work).matrix
    if r != 0:
        S = expm(squeeze_generator(r, Phi, n_work))
        rho_th = S @ rho_th @ S.conj().T
    block = rho_th[:n_max + 1, :n_max + 1]
    kept = float(np.real(np.trace(block)))
    defect = 1.0 - kept
    if defect > settings.TRUNCATION_TOL:
        raise truncation_error(
            f"squeezed thermal mode (omega={omega}, r={r}, T={T}) leaks beyond n_max={n_max}",
            defect=defect, tolerance=settings.TRUNCATION_TOL
        )
    logger.debug(f"Mode omega={omega} r={r} T={T}: truncation defect {defect:.2e}")
    return FockOperator(matrix=block / kept, n_max=n_max, truncation_defect=max(defect, 0.0))


def thermal_characteristic(theta: complex, omega: float, T: float) -> float:
    """Tr[rho_th D(theta)] = exp(-|theta|^2 coth(omega / 2T) / 2)"""
    coth = 1.0 if T <= 0 else 1.0 / math.tanh(0.5 * omega / T)
    return math.exp(-0.5 * abs(theta) ** 2 * coth)


# ---------------------------------------------------------------------------
# Finite-mode kernels
# ---------------------------------------------------------------------------

def discrete_gamma_eta(t: float, spec: DiscreteBathSpec, dE: Optional[float] = None) -> Tuple[float, float]:
    """
    Finite sums
        eta_d = -sum_k (g_k / omega_k)^2 sin(omega_k t)
        gamma_d = 1/2 sum_k (g_k / omega_k)^2 coth(omega_k / 2T) |(e^{i w t} - 1) cosh r_k + (e^{-i w t} - 1) sinh r_k e^{2i Phi_k}|^2
    """
    if t < 0:
        raise validation_error(f"time must be non-negative, got {t!r}", "t")
    eta_d, gamma_d = 0.0, 0.0
    for mode in spec.modes:
        w = mode.omega
        weight = (mode.g / w) ** 2
        coth = 1.0 if spec.T <= 0 else 1.0 / math.tanh(0.5 * w / spec.T)
        phase = complex(math.cos(w * t), math.sin(w * t))
        amp = (phase - 1) * math.cosh(mode.r) + (phase.conjugate() - 1) * math.sinh(mode.r) * complex(
            math.cos(2 * mode.Phi), math.sin(2 * mode.Phi))
        eta_d -= weight * math.sin(w * t)
        gamma_d += 0.5 * weight * coth * abs(amp) ** 2
    if dE is not None:
        logger.debug(f"t={t}: gamma_d={gamma_d:.6e}, coherence exponent dE^2 gamma_d={dE ** 2 * gamma_d:.6e}")
    return gamma_d, eta_d


def ohmic_discrete_bath(spec: BathSpec, K: int, n_max: int = None, omega_max_factor: float = 8.0) -> DiscreteBathSpec:
    """
    Midpoint sampling of the Ohmic density on [0, omega_max_factor * omega_c]:
    g_k^2 = I(omega_k) d_omega, r_k = r, Phi_k = a omega_k.
    """
    if K < 1:
        raise validation_error(f"need at least one mode, got K={K}", "K")
    d_omega = omega_max_factor * spec.omega_c / K
    omegas = (np.arange(K) + 0.5) * d_omega
    couplings = np.sqrt(ohmic_spectral_density(omegas, spec) * d_omega)
    modes = [BathMode(omega=float(w), g=float(g), r=spec.r, Phi=spec.a * float(w)) for w, g in zip(omegas, couplings)]
    return DiscreteBathSpec(modes=modes, T=spec.temperature, n_max=n_max or settings.FOCK_N_MAX_DEFAULT)


# ---------------------------------------------------------------------------
# Exact composite evolution
# ---------------------------------------------------------------------------

class CompositeOracle:
    """Full Hamiltonian and initial bath state for one (bath, spectrum) pair"""

    def __init__(self, spec: DiscreteBathSpec, spectrum: SystemSpectrum, include_counter_term: bool = True):
        total = spectrum.dimension * spec.bath_dimension
        if total > settings.COMPOSITE_DIM_CAP:
            raise validation_error(
                f"composite dimension {total} exceeds cap {settings.COMPOSITE_DIM_CAP}", "n_max"
            )
        self.spec = spec
        self.spectrum = spectrum
        self.include_counter_term = include_counter_term
        mode_states = [
            squeezed_thermal_mode(m.omega, m.r, m.Phi, spec.T, spec.n_max) for m in spec.modes
        ]
        self.truncation_defect = max(s.truncation_defect for s in mode_states)
        self.bath_state = kron_all([s.matrix for s in mode_states])
        self.hamiltonian = self._build_hamiltonian()
        logger.debug(f"Composite oracle: dimension {total}, counter term={include_counter_term}")

    def _build_hamiltonian(self) -> np.ndarray:
        spec = self.spec
        dims = [spec.n_max + 1] * spec.n_modes
        bath_dim = spec.bath_dimension
        b = annihilation(spec.n_max)
        x = b + b.conj().T
        H_R = sum(m.omega * embed(number(spec.n_max), k, dims) for k, m in enumerate(spec.modes))
        V = sum(m.g * embed(x, k, dims) for k, m in enumerate(spec.modes))
        E = self.spectrum.as_array()
        H_S = np.diag(E).astype(complex)
        H = np.kron(H_S, np.eye(bath_dim)) + np.kron(np.eye(E.size), H_R) + np.kron(H_S, V)
        if self.include_counter_term:
            shift = sum(m.g ** 2 / m.omega for m in spec.modes)
            H = H + shift * np.kron(H_S @ H_S, np.eye(bath_dim))
        return H

    def evolve(self, rho0: EnergyBasisDensityMatrix, t: float) -> EnergyBasisDensityMatrix:
        if rho0.dimension != self.spectrum.dimension:
            raise validation_error("system state does not match the spectrum", "rho0")
        require_density_matrix(rho0)
        U = hermitian_propagator(self.hamiltonian, t)
        total = U @ np.kron(rho0.entries, self.bath_state) @ U.conj().T
        return EnergyBasisDensityMatrix(partial_trace_bath(total, self.spectrum.dimension, self.spec.bath_dimension))


def exact_reduced_evolution(rho0_sys: EnergyBasisDensityMatrix, t: float, spec: DiscreteBathSpec,
                            spectrum: SystemSpectrum, include_counter_term: bool = True) -> EnergyBasisDensityMatrix:
    return CompositeOracle(spec, spectrum, include_counter_term).evolve(rho0_sys, t)


def analytic_reduced_evolution(rho0_sys: EnergyBasisDensityMatrix, t: float, spec: DiscreteBathSpec,
                               spectrum: SystemSpectrum) -> EnergyBasisDensityMatrix:
    gamma_d, eta_d = discrete_gamma_eta(t, spec)
    return evolve_with_kernels(rho0_sys, t, eta_d, gamma_d, spectrum)


def uniform_superposition(dimension: int) -> EnergyBasisDensityMatrix:
    return density_from_state(PureState(np.full(dimension, 1 / math.sqrt(dimension), dtype=complex)))


def verify_against_analytic(scenario: CompositeScenario) -> CompositeReport:
    """Compare exact and finite-mode analytic evolution; failures are reported, never raised"""
    spectrum = SystemSpectrum(energies=scenario.energies)
    rho0 = uniform_superposition(spectrum.dimension)
    try:
        oracle = CompositeOracle(scenario.bath, spectrum, scenario.include_counter_term)
        deviation, drift = 0.0, 0.0
        diag0 = np.diag(rho0.entries)
        for t in scenario.times:
            exact = oracle.evolve(rho0, t).entries
            analytic = analytic_reduced_evolution(rho0, t, scenario.bath, spectrum).entries
            deviation = max(deviation, float(np.max(np.abs(exact - analytic))))
            drift = max(drift, float(np.max(np.abs(np.diag(exact) - diag0))))
    except QNDLabError as e:
        logger.warning(f"Composite scenario {scenario.name} could not run: {e.message}")
        return CompositeReport(scenario.name, math.inf, math.nan, math.nan, scenario.tolerance, False, e.message)
    passed = deviation <= scenario.tolerance
    log = logger.info if passed else logger.warning
    log(f"Composite scenario {scenario.name}: deviation {deviation:.3e} (tolerance {scenario.tolerance:.0e})")
    return CompositeReport(scenario.name, deviation, oracle.truncation_defect, drift, scenario.tolerance, passed)


def default_scenarios() -> List[CompositeScenario]:
    """Uncoupled, single thermal mode and two squeezed thermal modes"""
    t_grid = [float(t) for t in np.linspace(0.0, 4 * math.pi, 9)]
    return [
        CompositeScenario(
            name="uncoupled",
            bath=DiscreteBathSpec(modes=[BathMode(omega=1.0, g=0.0)], T=0.5, n_max=10),
            times=t_grid, tolerance=1e-12,
        ),
        CompositeScenario(
            name="single_thermal_mode",
            energies=[1.0, 0.0],
            bath=DiscreteBathSpec(modes=[BathMode(omega=1.0, g=0.3)], T=1.0, n_max=30),
            times=t_grid, tolerance=1e-8,
        ),
        CompositeScenario(
            name="two_squeezed_modes",
            energies=[1.0, 0.0],
            bath=DiscreteBathSpec(
                modes=[BathMode(omega=1.0, g=0.2, r=0.3, Phi=0.4), BathMode(omega=1.7, g=0.15, r=0.3, Phi=1.1)],
                T=0.5, n_max=25,
            ),
            times=[0.0, 0.5, 1.0, 2.0, 3.0], tolerance=1e-4,
        ),
    ]


def verify_scenarios(scenarios: Sequence[CompositeScenario] = None) -> List[CompositeReport]:
    return parallel_map(verify_against_analytic, list(scenarios or default_scenarios()))
