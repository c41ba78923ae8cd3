from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import List, Optional
from dataclasses import dataclass
from enum import Enum
import numpy as np
import math


class SystemSpectrum(BaseModel):
    """Eigenvalues E_n of the system Hamiltonian"""
    model_config = ConfigDict(frozen=True)

    energies: List[float] = Field(..., min_length=1)

    @field_validator('energies')
    @classmethod
    def validate_energies(cls, v):
        if not all(math.isfinite(e) for e in v):
            raise ValueError('Energies must be finite real numbers')
        return v

    @property
    def dimension(self) -> int:
        return len(self.energies)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.energies, dtype=float)


@dataclass(frozen=True)
class PureState:
    """Amplitudes p_n of a pure system state in the energy eigenbasis"""
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amps.size == 0:
            raise ValueError('PureState needs at least one amplitude')
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f'PureState must be normalized (sum |p_n|^2 = {norm!r})')
        object.__setattr__(self, 'amplitudes', amps)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class EnergyBasisDensityMatrix:
    """Reduced density matrix rho_nm in the system eigenbasis"""
    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f'Density matrix must be square, got shape {rho.shape}')
        rho.setflags(write=False)
        object.__setattr__(self, 'entries', rho)

    @classmethod
    def from_pure_state(cls, state: PureState) -> "EnergyBasisDensityMatrix":
        p = state.amplitudes
        return cls(np.outer(p, p.conj()))

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def validation_errors(self, tol: float = 1e-12, psd_floor: float = -1e-10) -> List[str]:
        rho = self.entries
        problems = []
        if not np.all(np.isfinite(rho)):
            problems.append('non-finite entries')
            return problems
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if herm > tol:
            problems.append(f'not hermitian (deviation {herm:.3e})')
        tr = self.trace()
        if abs(tr - 1.0) > tol:
            problems.append(f'trace {tr:.15g} != 1')
        eigs = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if eigs.min() < psd_floor:
            problems.append(f'not positive semidefinite (min eigenvalue {eigs.min():.3e})')
        return problems

    def is_valid(self, tol: float = 1e-12) -> bool:
        return not self.validation_errors(tol)


class TwoLevelInitial(BaseModel):
    """|psi(0)> = cos(theta0/2)|1> + exp(i phi0) sin(theta0/2)|0>"""
    model_config = ConfigDict(frozen=True)

    theta0: float = Field(..., ge=0.0, le=math.pi)
    phi0: float = Field(0.0, ge=0.0, lt=2 * math.pi)


@dataclass(frozen=True)
class BlochVector:
    sx: float
    sy: float
    sz: float

    @classmethod
    def from_initial(cls, init: TwoLevelInitial) -> "BlochVector":
        st = math.sin(init.theta0)
        return cls(st * math.cos(init.phi0), st * math.sin(init.phi0), math.cos(init.theta0))

    def as_array(self) -> np.ndarray:
        return np.array([self.sx, self.sy, self.sz])

    def norm(self) -> float:
        return math.sqrt(self.sx ** 2 + self.sy ** 2 + self.sz ** 2)

    def in_ball(self, tol: float = 1e-12) -> bool:
        return self.norm() <= 1.0 + tol


@dataclass(frozen=True)
class LindbladParams:
    """Squeezed thermal Lindblad constants for a two-level atom"""
    gamma0: float
    r: float
    Phi: float
    omega: float
    T: float
    N_th: float
    N: float
    M: complex
    a_sq: float

    def __post_init__(self):
        if self.N_th < 0 or self.N < 0:
            raise ValueError('Photon numbers must be non-negative')
        if abs(self.M) ** 2 > self.N * (self.N + 1) * (1 + 1e-12) + 1e-15:
            raise ValueError('|M|^2 must not exceed N(N+1)')


class DiffusionSolutionParams(BaseModel):
    """Constants of the long-time phase-diffusion solutions"""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lambda_: float = Field(0.0, alias='lambda')
    alpha_sep: float = 0.0
    c1: float = 1.0
    c2: float = 0.0
    A1: float = Field(..., gt=0)
    omega: float = Field(..., gt=0)

    @model_validator(mode='after')
    def validate_real_b(self):
        bound = self.omega ** 2 / (4 * self.A1)
        if self.alpha_sep > bound:
            raise ValueError(f'alpha_sep must not exceed omega^2/(4 A1) = {bound!r} for real B')
        return self

    @property
    def A(self) -> float:
        return self.omega / (2 * self.A1)

    @property
    def B(self) -> float:
        return self.A * math.sqrt(1 - 4 * self.alpha_sep * self.A1 / self.omega ** 2)


@dataclass(frozen=True)
class QGrid:
    """Husimi Q sampled on a polar grid alpha = xi exp(i theta); values[i, j] = Q(xi_i, theta_j)"""
    xi: np.ndarray
    theta: np.ndarray
    values: np.ndarray
    t: Optional[float] = None

    @property
    def shape(self):
        return self.values.shape

    @property
    def d_xi(self) -> float:
        return float(self.xi[1] - self.xi[0])

    @property
    def d_theta(self) -> float:
        return float(self.theta[1] - self.theta[0])


@dataclass(frozen=True)
class CoherencePairTerm:
    """
    Long-time high-temperature behaviour of one (n, m) coherence pair:
    log of its contribution ~ log(weight) - decay_rate * t + log_offset + power_exponent * log(omega_c t)
    """
    n: int
    m: int
    weight: float
    decay_rate: float
    log_offset: float
    power_exponent: float


class Channel(str, Enum):
    QND = "qnd"
    LINDBLAD = "lindblad"


@dataclass(frozen=True)
class CloudPoint:
    initial: BlochVector
    final: BlochVector
