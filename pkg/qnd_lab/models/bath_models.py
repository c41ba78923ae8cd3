from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Optional, List
from dataclasses import dataclass
from enum import Enum
import math


class TemperatureMode(str, Enum):
    ZERO = "zero"
    HIGH = "high"
    EXACT = "exact"


class BathSpec(BaseModel):
    """Ohmic squeezed thermal bath, I(w) = (gamma0/pi) w exp(-w/omega_c), Phi(w) = a w"""
    model_config = ConfigDict(frozen=True)

    gamma0: float = Field(..., gt=0, description="Dimensionless coupling strength")
    omega_c: float = Field(..., gt=0, description="Cutoff frequency")
    r: float = Field(0.0, description="Squeezing magnitude")
    a: float = Field(0.0, ge=0, description="Squeezing-phase slope (time units)")
    temperature_mode: TemperatureMode = TemperatureMode.ZERO
    T: float = Field(0.0, ge=0, description="Temperature (hbar = k_B = 1)")

    @field_validator('gamma0', 'omega_c', 'r', 'a', 'T')
    @classmethod
    def validate_finite(cls, v):
        if not math.isfinite(v):
            raise ValueError('Bath parameters must be finite')
        return v

    @model_validator(mode='after')
    def validate_temperature(self):
        if self.temperature_mode != TemperatureMode.ZERO and self.T <= 0:
            raise ValueError(f'T must be positive for temperature_mode={self.temperature_mode.value}')
        return self

    @property
    def temperature(self) -> float:
        """Effective temperature; mode zero is exactly 0"""
        if self.temperature_mode == TemperatureMode.ZERO:
            return 0.0
        return self.T


@dataclass(frozen=True)
class KernelSample:
    t: float
    eta: float
    eta_dot: float
    gamma: float
    gamma_dot: float


@dataclass(frozen=True)
class LongTimeLimits:
    """Asymptotes of the bath kernels"""
    eta_inf: float
    # gamma_dot ~ zero_t_rate_coefficient / t at T = 0
    zero_t_rate_coefficient: float
    # gamma(t) -> high_t_slope * t + high_t_offset as omega_c -> infinity (mode high only)
    high_t_slope: Optional[float] = None
    high_t_offset: Optional[float] = None
    gamma_dot_inf: Optional[float] = None


class BathMode(BaseModel):
    """Single reservoir oscillator"""
    model_config = ConfigDict(frozen=True)

    omega: float = Field(..., gt=0)
    g: float = Field(..., description="Coupling constant (real)")
    r: float = 0.0
    Phi: float = 0.0


class DiscreteBathSpec(BaseModel):
    """Finite set of reservoir modes in truncated Fock spaces"""
    model_config = ConfigDict(frozen=True)

    modes: List[BathMode] = Field(..., min_length=1)
    T: float = Field(0.0, ge=0)
    n_max: int = Field(30, ge=4)

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def bath_dimension(self) -> int:
        return (self.n_max + 1) ** len(self.modes)


class SpinMode(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega: float = Field(..., gt=0)
    C: float = 0.0


class SpinBathSpec(BaseModel):
    """Bath of two-level systems, H_R = sum_k omega_k sigma_zk, H_SR = H_S sum_k C_k sigma_xk"""
    model_config = ConfigDict(frozen=True)

    modes: List[SpinMode] = Field(..., min_length=1)

    @property
    def n_modes(self) -> int:
        return len(self.modes)
