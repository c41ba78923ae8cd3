from .errors import (
    QNDLabError,
    ValidationFailure,
    KernelDomainError,
    NumericalError,
    TruncationError,
    VerificationFailure,
    validation_error,
    domain_error,
    numerical_error,
    truncation_error,
    verification_failure
)
from .parallel import parallel_map

__all__ = [
    'QNDLabError',
    'ValidationFailure',
    'KernelDomainError',
    'NumericalError',
    'TruncationError',
    'VerificationFailure',
    'validation_error',
    'domain_error',
    'numerical_error',
    'truncation_error',
    'verification_failure',
    'parallel_map'
]
