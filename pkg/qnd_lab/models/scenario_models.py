from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import List, Optional, Dict, Any, Tuple
from enum import Enum
import math

import numpy as np

from .bath_models import BathSpec
from .system_models import Channel


class Quantity(str, Enum):
    KERNELS = "kernels"
    ENTROPY = "entropy"
    BLOCH = "bloch"
    QFUNC = "qfunc"


class SystemKind(str, Enum):
    TWO_LEVEL = "two_level"
    OSCILLATOR = "oscillator"
    CUSTOM = "custom"


class VerifyLevel(str, Enum):
    QUICK = "quick"
    FULL = "full"


class TimeGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_min: float = Field(0.0, ge=0)
    t_max: float = Field(..., gt=0)
    points: int = Field(101, ge=2)

    @model_validator(mode='after')
    def validate_increasing(self):
        if not self.t_max > self.t_min:
            raise ValueError(f't_max ({self.t_max}) must exceed t_min ({self.t_min})')
        return self

    def times(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.points)


class SystemConfig(BaseModel):
    """Two-level atom, harmonic oscillator in a coherent state, or an explicit spectrum"""
    model_config = ConfigDict(frozen=True)

    kind: SystemKind = SystemKind.TWO_LEVEL
    omega: float = Field(1.0, gt=0)
    alpha_sq: float = Field(5.0, ge=0)
    n_max: Optional[int] = Field(None, ge=1)
    energies: Optional[List[float]] = None

    @model_validator(mode='after')
    def validate_custom(self):
        if self.kind == SystemKind.CUSTOM:
            if not self.energies:
                raise ValueError('custom systems need an energies list')
            if not all(math.isfinite(e) for e in self.energies):
                raise ValueError('energies must be finite')
        return self


class CloudConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: float = Field(..., ge=0)
    n_theta: int = Field(16, ge=2)
    n_phi: int = Field(16, ge=2)


class ChannelConfig(BaseModel):
    """Bloch output settings; the Lindblad channel reads T from the bath section directly"""
    model_config = ConfigDict(frozen=True)

    channel: Channel = Channel.QND
    theta0: float = Field(math.pi / 2, ge=0, le=math.pi)
    phi0: float = Field(0.0, ge=0, lt=2 * math.pi)
    Phi: float = 0.0
    schrodinger: bool = False
    cloud: Optional[CloudConfig] = None


class QGridConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_xi: int = Field(64, ge=3)
    n_theta: int = Field(64, ge=4)
    xi_max: Optional[float] = Field(None, gt=0)


class ScenarioConfig(BaseModel):
    """One sweep: a quantity evaluated over a time grid for a bath and a system"""
    model_config = ConfigDict(frozen=True)

    scenario: str = "sweep"
    quantity: Quantity = Quantity.KERNELS
    bath: BathSpec
    system: SystemConfig = SystemConfig()
    time: TimeGrid
    channel: ChannelConfig = ChannelConfig()
    qgrid: QGridConfig = QGridConfig()
    out: Optional[str] = None

    @field_validator('scenario')
    @classmethod
    def validate_name(cls, v):
        if not v or any(c in v for c in '/\\'):
            raise ValueError('scenario name must be a non-empty file-safe string')
        return v

    @model_validator(mode='after')
    def validate_quantity(self):
        if self.quantity == Quantity.QFUNC and self.system.kind != SystemKind.OSCILLATOR:
            raise ValueError('qfunc needs an oscillator system')
        if self.quantity == Quantity.BLOCH and self.system.kind != SystemKind.TWO_LEVEL:
            raise ValueError('bloch needs a two_level system')
        return self


class FigureCurve(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    config: ScenarioConfig


class FigureScenario(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    caption: str
    curves: List[FigureCurve] = Field(..., min_length=1)


class CriterionResult(BaseModel):
    name: str
    passed: bool
    measured: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""
    elapsed_s: float = 0.0


class VerificationReport(BaseModel):
    level: VerifyLevel
    criteria: List[CriterionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    @property
    def failed(self) -> List[str]:
        return [c.name for c in self.criteria if not c.passed]

    def summary(self) -> Dict[str, Any]:
        return {
            'level': self.level.value,
            'passed': self.passed,
            'failed': self.failed,
            'criteria': [c.model_dump() for c in self.criteria],
        }
