"""
Bloch-vector dynamics of a two-level atom

Basis ordering: index 0 is the upper level |1>, index 1 is |0>, so sz = +1 at the north pole
and sigma_- = |0><1| lowers the atom.

Two channels are provided:
  - QND phase damping: sz frozen, transverse components spiral in at rate omega^2 gamma_dot(t)
  - squeezed thermal Lindblad evolution (interaction picture): generalized amplitude damping
    towards (0, 0, -1/(2N+1)) with transverse rates gamma0 (2N + 1 -+ a_sq) / 2
"""
import math
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from ..models.bath_models import BathSpec
from ..models.system_models import (
    BlochVector,
    Channel,
    CloudPoint,
    EnergyBasisDensityMatrix,
    LindbladParams,
    PureState,
    TwoLevelInitial,
)
from ..utils import parallel_map, validation_error
from . import bath_kernels
from .integrators import rk4_integrate
from .operators import PAULI_X, PAULI_Y, PAULI_Z, SIGMA_MINUS, SIGMA_PLUS
from .qnd_dynamics import density_from_state, evolve_density, two_level_spectrum


def initial_state(init: TwoLevelInitial) -> PureState:
    """cos(theta0/2)|1> + exp(i phi0) sin(theta0/2)|0>"""
    return PureState(np.array([
        math.cos(0.5 * init.theta0),
        np.exp(1j * init.phi0) * math.sin(0.5 * init.theta0),
    ], dtype=complex))


def bloch_from_density(rho: np.ndarray) -> BlochVector:
    rho = np.asarray(rho)
    return BlochVector(
        float(np.real(np.trace(rho @ PAULI_X))),
        float(np.real(np.trace(rho @ PAULI_Y))),
        float(np.real(np.trace(rho @ PAULI_Z))),
    )


def density_from_bloch(bloch: BlochVector) -> np.ndarray:
    return 0.5 * (np.eye(2) + bloch.sx * PAULI_X + bloch.sy * PAULI_Y + bloch.sz * PAULI_Z)


# ---------------------------------------------------------------------------
# QND phase damping
# ---------------------------------------------------------------------------

def qnd_density(t: float, init: TwoLevelInitial, spec: BathSpec, omega: float) -> EnergyBasisDensityMatrix:
    rho0 = density_from_state(initial_state(init))
    return evolve_density(rho0, t, spec, two_level_spectrum(omega))


def _qnd_map(init: TwoLevelInitial, t: float, omega: float, decay: float) -> BlochVector:
    radius = math.sin(init.theta0) * decay
    phase = omega * t + init.phi0
    return BlochVector(radius * math.cos(phase), radius * math.sin(phase), math.cos(init.theta0))


def qnd_bloch(t: float, init: TwoLevelInitial, spec: BathSpec, omega: float) -> BlochVector:
    """Phase-damping channel; sz = cos(theta0) is returned exactly"""
    if not omega > 0:
        raise validation_error(f"omega must be positive, got {omega!r}", "omega")
    decay = math.exp(-omega ** 2 * bath_kernels.gamma(t, spec))
    return _qnd_map(init, t, omega, decay)


# ---------------------------------------------------------------------------
# Squeezed thermal Lindblad channel
# ---------------------------------------------------------------------------

def thermal_photon_number(omega: float, T: float) -> float:
    if T == 0:
        return 0.0
    return 1.0 / math.expm1(omega / T)


def lindblad_params(gamma0: float, r: float, Phi: float, omega: float, T: float) -> LindbladParams:
    if not gamma0 > 0:
        raise validation_error(f"gamma0 must be positive, got {gamma0!r}", "gamma0")
    if not omega > 0:
        raise validation_error(f"omega must be positive, got {omega!r}", "omega")
    if not T >= 0:
        raise validation_error(f"T must be non-negative, got {T!r}", "T")
    if not all(math.isfinite(v) for v in (r, Phi)):
        raise validation_error("r and Phi must be finite", "r")
    n_th = thermal_photon_number(omega, T)
    ch2, sh2 = math.cosh(r) ** 2, math.sinh(r) ** 2
    N = n_th * (ch2 + sh2) + sh2
    M = -0.5 * math.sinh(2 * r) * complex(math.cos(Phi), math.sin(Phi)) * (2 * n_th + 1)
    a_sq = math.sinh(2 * r) * (2 * n_th + 1)
    return LindbladParams(gamma0=gamma0, r=r, Phi=Phi, omega=omega, T=T, N_th=n_th, N=N, M=M, a_sq=a_sq)


def lindblad_rhs(rho: np.ndarray, params: LindbladParams) -> np.ndarray:
    """Right-hand side of the squeezed thermal master equation for a 2x2 density matrix"""
    g0, N, M = params.gamma0, params.N, params.M
    sm, sp = SIGMA_MINUS, SIGMA_PLUS
    pm, mp = sp @ sm, sm @ sp
    drho = g0 * (N + 1) * (sm @ rho @ sp - 0.5 * (pm @ rho + rho @ pm))
    drho += g0 * N * (sp @ rho @ sm - 0.5 * (mp @ rho + rho @ mp))
    drho -= g0 * M * (sp @ rho @ sp)
    drho -= g0 * np.conj(M) * (sm @ rho @ sm)
    return drho


def transverse_decay_rates(params: LindbladParams) -> Tuple[float, float]:
    """Slow and fast transverse eigen-rates gamma0 (2N + 1 -+ |a_sq|) / 2"""
    base = 2 * params.N + 1
    spread = abs(params.a_sq)
    return params.gamma0 * (base - spread) / 2, params.gamma0 * (base + spread) / 2


def lindblad_bloch(t: float, init: TwoLevelInitial, params: LindbladParams) -> BlochVector:
    """Closed-form interaction-picture Bloch vector; no free rotation is applied"""
    if not (math.isfinite(t) and t >= 0):
        raise validation_error(f"time must be finite and non-negative, got {t!r}", "t")
    s0 = BlochVector.from_initial(init)
    g0, base = params.gamma0, 2 * params.N + 1
    decay = math.exp(-0.5 * g0 * base * t)
    kappa_t = 0.5 * g0 * params.a_sq * t
    ch, sh = math.cosh(kappa_t), math.sinh(kappa_t)
    cP, sP = math.cos(params.Phi), math.sin(params.Phi)
    sx = decay * ((ch + cP * sh) * s0.sx - sP * sh * s0.sy)
    sy = decay * (-sP * sh * s0.sx + (ch - cP * sh) * s0.sy)
    relax = math.exp(-g0 * base * t)
    sz = relax * s0.sz - (1.0 - relax) / base
    return BlochVector(sx, sy, sz)


def lindblad_bloch_rk4(t: float, init: TwoLevelInitial, params: LindbladParams, h: float = 1e-3) -> BlochVector:
    """Bloch vector from direct RK4 integration of the master equation"""
    rho0 = density_from_bloch(BlochVector.from_initial(init))
    rho_t = rk4_integrate(lambda s, y: lindblad_rhs(y, params), rho0, 0.0, t, h)
    return bloch_from_density(rho_t)


def asymptotic_state(params: LindbladParams) -> Tuple[BlochVector, float]:
    """Fixed point (0, 0, -1/(2N+1)) and the ground-level population p = (1 + 1/(2N+1)) / 2"""
    base = 2 * params.N + 1
    return BlochVector(0.0, 0.0, -1.0 / base), 0.5 * (1.0 + 1.0 / base)


def schrodinger_rotation(bloch: BlochVector, omega: float, t: float) -> BlochVector:
    """Apply the free precession exp(-i omega t sigma_z / 2) to an interaction-picture Bloch vector"""
    c, s = math.cos(omega * t), math.sin(omega * t)
    return BlochVector(c * bloch.sx - s * bloch.sy, s * bloch.sx + c * bloch.sy, bloch.sz)


# ---------------------------------------------------------------------------
# Point clouds
# ---------------------------------------------------------------------------

def sphere_grid(n_theta: int, n_phi: int) -> List[TwoLevelInitial]:
    """Latitude-longitude grid of pure states, poles included"""
    if n_theta < 2 or n_phi < 2:
        raise validation_error(f"cloud sampling needs n_theta, n_phi >= 2, got ({n_theta}, {n_phi})", "sampling")
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = 2 * math.pi * np.arange(n_phi) / n_phi
    return [TwoLevelInitial(theta0=float(th), phi0=float(ph)) for th in thetas for ph in phis]


def bloch_cloud(channel: Channel, t: float, sampling: Tuple[int, int], *,
                spec: Optional[BathSpec] = None, omega: Optional[float] = None,
                params: Optional[LindbladParams] = None, schrodinger: bool = False) -> List[CloudPoint]:
    """
    Map a grid of initial pure states through the selected channel.

    The QND channel needs spec and omega; the Lindblad channel needs params (and omega only
    when a Schrodinger-picture rotation is requested).
    """
    channel = Channel(channel)
    grid = sphere_grid(*sampling)
    if channel == Channel.QND:
        if spec is None or omega is None:
            raise validation_error("QND cloud needs a bath spec and omega", "spec")
        decay = math.exp(-omega ** 2 * bath_kernels.gamma(t, spec))

        def mapper(init: TwoLevelInitial) -> CloudPoint:
            return CloudPoint(BlochVector.from_initial(init), _qnd_map(init, t, omega, decay))
    else:
        if params is None:
            raise validation_error("Lindblad cloud needs LindbladParams", "params")
        if schrodinger and omega is None:
            omega = params.omega

        def mapper(init: TwoLevelInitial) -> CloudPoint:
            final = lindblad_bloch(t, init, params)
            if schrodinger:
                final = schrodinger_rotation(final, omega, t)
            return CloudPoint(BlochVector.from_initial(init), final)

    points = parallel_map(mapper, grid)
    logger.debug(f"{channel.value} cloud at t={t}: {len(points)} points")
    return points
