from pydantic import BaseModel, ConfigDict, Field, field_validator
from typing import List, Optional, Dict, Any
from dataclasses import dataclass, asdict
import numpy as np

from .bath_models import DiscreteBathSpec


@dataclass(frozen=True)
class FockOperator:
    """Dense matrix over the truncated Fock basis |0>..|n_max> of one mode (or a tensor product of modes)"""
    matrix: np.ndarray
    n_max: int
    n_modes: int = 1
    truncation_defect: float = 0.0

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


class CompositeScenario(BaseModel):
    """Two-level (or small) system coupled to a few discrete bath modes"""
    model_config = ConfigDict(frozen=True)

    name: str
    bath: DiscreteBathSpec
    energies: List[float] = Field(default_factory=lambda: [0.5, -0.5], min_length=1)
    times: List[float] = Field(..., min_length=1)
    tolerance: float = Field(1e-8, gt=0)
    include_counter_term: bool = True

    @field_validator('times')
    @classmethod
    def validate_times(cls, v):
        if any(t < 0 for t in v):
            raise ValueError('Scenario times must be non-negative')
        return v


@dataclass
class CompositeReport:
    name: str
    max_deviation: float
    truncation_defect: float
    diagonal_drift: float
    tolerance: float
    passed: bool
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
