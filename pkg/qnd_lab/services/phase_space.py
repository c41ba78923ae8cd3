"""
Husimi Q function of the QND harmonic oscillator

Q(alpha) = <alpha|rho|alpha> / pi on the polar grid alpha = xi exp(i theta). Under QND evolution
with E_n = omega (n + 1/2), Q obeys
    dQ/dt = omega dQ/dtheta - omega^2 eta_dot(t) [(1 + 2 xi^2) d_theta + xi d_xi d_theta] Q
            + omega^2 gamma_dot(t) d_theta^2 Q
The long-time solutions of the reduced drift and drift-diffusion equations are evaluated on
unrestricted real theta.
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special
from loguru import logger

from ..models.bath_models import BathSpec, TemperatureMode
from ..models.system_models import DiffusionSolutionParams, EnergyBasisDensityMatrix, QGrid
from ..utils import truncation_error, validation_error
from . import bath_kernels
from .qnd_dynamics import evolve_density, ho_spectrum

DEFAULT_GRID_POINTS = 64


@dataclass(frozen=True)
class PdeResidual:
    """Pointwise residual at the interior snapshots; norm and scale are the largest per-snapshot weighted L2 norms"""
    field: np.ndarray
    norm: float
    scale: float

    @property
    def relative(self) -> float:
        return self.norm / self.scale if self.scale > 0 else self.norm


def polar_grid(xi_max: float, n_xi: int = DEFAULT_GRID_POINTS,
               n_theta: int = DEFAULT_GRID_POINTS) -> Tuple[np.ndarray, np.ndarray]:
    """xi uniformly on [0, xi_max] (endpoints included), theta uniformly on [0, 2 pi)"""
    if not xi_max > 0:
        raise validation_error(f"xi_max must be positive, got {xi_max!r}", "xi_max")
    if n_xi < 3 or n_theta < 4:
        raise validation_error(f"grid too coarse: n_xi={n_xi}, n_theta={n_theta}", "grid")
    return np.linspace(0.0, xi_max, n_xi), 2 * math.pi * np.arange(n_theta) / n_theta


def default_xi_max(alpha_sq: float) -> float:
    return math.sqrt(alpha_sq) + 6.0


def coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    """<n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!), n = 0..n_max"""
    alpha = complex(alpha)
    n = np.arange(n_max + 1)
    amps = np.zeros(n_max + 1, dtype=complex)
    if alpha == 0:
        amps[0] = 1.0
        return amps
    log_mod = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * special.gammaln(n + 1)
    return np.exp(log_mod + 1j * n * np.angle(alpha))


def coherent_density(beta: complex, n_max: int) -> np.ndarray:
    """|beta><beta| truncated to n_max and renormalized"""
    v = coherent_amplitudes(beta, n_max)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def _overlap_matrix(xi: np.ndarray, theta: np.ndarray, n_max: int) -> np.ndarray:
    """V[n, i, j] = <n|alpha_ij> for alpha_ij = xi_i exp(i theta_j)"""
    n = np.arange(n_max + 1)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_xi = np.log(xi)[None, :]
        log_mod = -0.5 * xi[None, :] ** 2 + n * log_xi - 0.5 * special.gammaln(n + 1)
    # 0 * log(0) is the n = 0 amplitude at the origin
    log_mod = np.where((n == 0) & (xi[None, :] == 0), -0.0, log_mod)
    radial = np.exp(log_mod)
    phase = np.exp(1j * np.arange(n_max + 1)[:, None] * theta[None, :])
    return radial[:, :, None] * phase[:, None, :]


def q_from_density(rho: np.ndarray, xi: np.ndarray, theta: np.ndarray, t: Optional[float] = None,
                   tail_tol: float = 1e-10) -> QGrid:
    """
    Q on the polar grid from a Fock-basis density matrix.

    The truncated state must have unit trace and an (almost) empty top Fock level.
    """
    if isinstance(rho, EnergyBasisDensityMatrix):
        rho = rho.entries
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    defect = max(abs(np.trace(rho) - 1.0), float(np.real(rho[-1, -1])))
    if defect > tail_tol:
        raise truncation_error(
            f"Fock truncation n_max={dim - 1} does not resolve the state", defect=defect, tolerance=tail_tol
        )
    xi = np.asarray(xi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    V = _overlap_matrix(xi, theta, dim - 1)
    # <alpha|rho|alpha> = sum_nm conj(V_n) rho_nm V_m
    values = np.real(np.einsum('nij,nm,mij->ij', V.conj(), rho, V)) / math.pi
    return QGrid(xi=xi, theta=theta, values=values, t=t)


def normalization(qgrid: QGrid) -> float:
    """Integral of Q xi dxi dtheta: Simpson in xi, periodic trapezoid in theta"""
    return float(integrate.simpson(radial_marginal(qgrid) * qgrid.xi, x=qgrid.xi))


def radial_marginal(qgrid: QGrid) -> np.ndarray:
    """Angular integral of Q at each xi"""
    return qgrid.values.sum(axis=1) * (2 * math.pi / qgrid.theta.size)


def q_snapshots(rho0: np.ndarray, times: Sequence[float], spec: BathSpec, omega: float,
                xi: np.ndarray, theta: np.ndarray) -> list:
    """Q grids of rho0 evolved under QND dynamics with E_n = omega (n + 1/2)"""
    rho = EnergyBasisDensityMatrix(rho0)
    spectrum = ho_spectrum(omega, rho.dimension - 1)
    return [
        q_from_density(evolve_density(rho, float(t), spec, spectrum).entries, xi, theta, t=float(t))
        for t in times
    ]


# ---------------------------------------------------------------------------
# PDE residual
# ---------------------------------------------------------------------------

def _d_theta(q: np.ndarray, d_theta: float) -> np.ndarray:
    return (np.roll(q, -1, axis=-1) - np.roll(q, 1, axis=-1)) / (2 * d_theta)


def _d2_theta(q: np.ndarray, d_theta: float) -> np.ndarray:
    return (np.roll(q, -1, axis=-1) - 2 * q + np.roll(q, 1, axis=-1)) / d_theta ** 2


def q_pde_residual(q_series: Sequence[QGrid], spec: BathSpec, omega: float) -> PdeResidual:
    """
    Residual of the polar Q equation from central differences.

    Time derivatives use neighbouring snapshots, so residuals exist at the interior snapshots only.
    theta is periodic; xi uses second-order one-sided stencils at the ends.
    """
    if len(q_series) < 3:
        raise validation_error(f"need at least 3 snapshots, got {len(q_series)}", "q_series")
    times = np.array([q.t for q in q_series], dtype=float)
    if np.any(np.isnan(times)):
        raise validation_error("every snapshot needs its time stamp", "q_series")
    steps = np.diff(times)
    if np.any(steps <= 0) or np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(steps[0])):
        raise validation_error("snapshots must be uniformly spaced in time", "q_series")
    dt = float(steps[0])

    xi, d_th = q_series[0].xi, q_series[0].d_theta
    d_xi = q_series[0].d_xi
    w2 = omega ** 2
    stack = np.stack([q.values for q in q_series])
    weights = xi[:, None] * d_xi * d_th

    fields, terms = [], []
    for k in range(1, len(q_series) - 1):
        t = float(times[k])
        q = stack[k]
        dq_dt = (stack[k + 1] - stack[k - 1]) / (2 * dt)
        dq_th = _d_theta(q, d_th)
        drift = omega * dq_th
        eta_term = -w2 * bath_kernels.eta_dot(t, spec) * (
            (1 + 2 * xi[:, None] ** 2) * dq_th + xi[:, None] * np.gradient(dq_th, d_xi, axis=0, edge_order=2)
        )
        diffusion = w2 * bath_kernels.gamma_dot(t, spec) * _d2_theta(q, d_th)
        fields.append(dq_dt - drift - eta_term - diffusion)
        terms.extend([dq_dt, drift, eta_term, diffusion])

    def wnorm(f: np.ndarray) -> float:
        return float(np.sqrt(np.sum(weights * np.abs(f) ** 2)))

    field = np.stack(fields)
    norm = max(wnorm(f) for f in fields)
    scale = max(wnorm(f) for f in terms)
    logger.debug(f"Q residual: norm={norm:.3e}, largest term={scale:.3e}")
    return PdeResidual(field=field, norm=norm, scale=scale)


def convergence_order(coarse: float, fine: float, ratio: float = 2.0) -> float:
    """Observed order from residual norms at spacing h and h / ratio"""
    if coarse <= 0 or fine <= 0:
        raise validation_error("residual norms must be positive to estimate an order", "norms")
    return math.log(coarse / fine) / math.log(ratio)


# ---------------------------------------------------------------------------
# Long-time solutions
# ---------------------------------------------------------------------------

def longtime_solution_T0(theta, t, lam: float, omega: float):
    """Drift-only solution Q = exp(-lam t) exp(-lam theta / omega) of dQ/dt = omega dQ/dtheta"""
    if not omega > 0:
        raise validation_error(f"omega must be positive, got {omega!r}", "omega")
    return np.exp(-lam * np.asarray(t) - lam * np.asarray(theta) / omega)


def residual_T0(theta, t, lam: float, omega: float):
    q = longtime_solution_T0(theta, t, lam, omega)
    return (-lam * q) - omega * (-lam / omega * q)


def diffusion_coefficient(spec: BathSpec, omega: float) -> float:
    """A1 = omega^2 gamma_dot(infinity) = omega^2 gamma0 T cosh(2r) in mode high"""
    if spec.temperature_mode != TemperatureMode.HIGH:
        raise validation_error("the diffusion coefficient is defined for temperature_mode=high", "temperature_mode")
    return omega ** 2 * bath_kernels.longtime_limits(spec).gamma_dot_inf


def diffusion_params(spec: BathSpec, omega: float, alpha_sep: float = 0.0, c1: float = 1.0,
                     c2: float = 0.0, lam: float = 0.0) -> DiffusionSolutionParams:
    return DiffusionSolutionParams(
        lambda_=lam, alpha_sep=alpha_sep, c1=c1, c2=c2, A1=diffusion_coefficient(spec, omega), omega=omega
    )


def _highT_parts(theta, t, params: DiffusionSolutionParams):
    theta = np.asarray(theta, dtype=float)
    A, B = params.A, params.B
    damp = np.exp(-params.alpha_sep * np.asarray(t, dtype=float))
    up = params.c1 * np.exp((B - A) * theta)
    down = params.c2 * np.exp(-(A + B) * theta)
    return damp, up, down, B - A, -(A + B)


def longtime_solution_highT(theta, t, params: DiffusionSolutionParams, omega: float):
    """exp(-alpha t) exp(-A theta) [c1 exp(B theta) + c2 exp(-B theta)]"""
    if abs(omega - params.omega) > 1e-12 * omega:
        raise validation_error(f"omega={omega!r} differs from params.omega={params.omega!r}", "omega")
    damp, up, down, _, _ = _highT_parts(theta, t, params)
    return damp * (up + down)


def residual_highT(theta, t, params: DiffusionSolutionParams):
    """dQ/dt - omega dQ/dtheta - A1 d^2Q/dtheta^2 from exact derivatives"""
    damp, up, down, k_up, k_down = _highT_parts(theta, t, params)
    q = damp * (up + down)
    q_th = damp * (k_up * up + k_down * down)
    q_thth = damp * (k_up ** 2 * up + k_down ** 2 * down)
    return -params.alpha_sep * q - params.omega * q_th - params.A1 * q_thth
