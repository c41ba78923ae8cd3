from typing import Optional, Dict, Any
from loguru import logger


class QNDLabError(Exception):
    """Base error carrying a machine-readable code and a process exit status"""
    error_code = "QND_LAB_ERROR"
    exit_code = 2

    def __init__(self, message: str, error_code: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        if error_code:
            self.error_code = error_code
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        body = {
            'success': False,
            'message': self.message,
            'error_code': self.error_code
        }
        if self.details:
            body['details'] = self.details
        return body


class ValidationFailure(QNDLabError):
    error_code = "VALIDATION_ERROR"
    exit_code = 1


class KernelDomainError(ValidationFailure):
    error_code = "DOMAIN_ERROR"


class NumericalError(QNDLabError):
    error_code = "NUMERICAL_ERROR"
    exit_code = 2


class TruncationError(NumericalError):
    error_code = "TRUNCATION_ERROR"


class VerificationFailure(QNDLabError):
    error_code = "VERIFICATION_FAILED"
    exit_code = 3


def validation_error(message: str, field: Optional[str] = None) -> ValidationFailure:
    details = {'field': field} if field else None
    logger.warning(f"Validation error: {message}")
    return ValidationFailure(message, details=details)


def domain_error(message: str, **details) -> KernelDomainError:
    logger.warning(f"Domain error: {message}")
    return KernelDomainError(message, details=details or None)


def numerical_error(message: str, **details) -> NumericalError:
    logger.error(f"Numerical error: {message}")
    return NumericalError(message, details=details or None)


def truncation_error(message: str, defect: float, tolerance: float, **details) -> TruncationError:
    logger.error(f"Truncation error: {message} (defect={defect:.3e}, tolerance={tolerance:.1e})")
    return TruncationError(message, details={'defect': defect, 'tolerance': tolerance, **details})


def verification_failure(failed: list) -> VerificationFailure:
    names = ', '.join(failed)
    logger.error(f"Verification failed: {names}")
    return VerificationFailure(f"Failed criteria: {names}", details={'failed': failed})
