"""
Error hierarchy for the dP3 toolkit.

Validation errors (bad input, unreachable conventions, out-of-domain requests)
map to exit status 2; numerical failures (singularity approach, precision loss,
falsified structural identities) map to exit status 3.
"""

from typing import Any, Dict, List, Optional

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class Dp3Error(Exception):
    """Base class. Every error carries a JSON-friendly details dict."""

    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'error': type(self).__name__,
            'message': self.message,
            'exit_code': self.exit_code,
            'details': {k: str(v) if not isinstance(v, (int, float, list, dict, type(None))) else v
                        for k, v in self.details.items()},
        }


class ValidationError(Dp3Error, ValueError):
    exit_code = EXIT_VALIDATION


class NumericalFailure(Dp3Error, ArithmeticError):
    exit_code = EXIT_NUMERICAL


# --- validation class -------------------------------------------------------

class GammaPoleError(ValidationError):
    pass


class ZeroA0Error(ValidationError):
    pass


class TableTooShortError(ValidationError):
    pass


class UnsupportedLabelError(ValidationError):
    pass


class OrderTooShortError(ValidationError):
    pass


class DeterminantCapError(ValidationError):
    pass


class RadiusViolationError(ValidationError):
    pass


class ChartDomainError(ValidationError):
    pass


class ExcludedValueError(ValidationError):
    """H(0) sits at a value where the generic monodromy formula degenerates."""

    def __init__(self, message: str, case: int, details: Optional[Dict[str, Any]] = None):
        details = dict(details or {})
        details['algebraic_case'] = case
        super().__init__(message, details)
        self.case = case


class ConventionUnreachableError(ValidationError):
    pass


class BoundaryError(ValidationError):
    pass


class StripViolationError(ValidationError):
    pass


class WindowTooShortError(ValidationError):
    pass


class ConditionViolationError(ValidationError):
    """Raised with the full list of violated theorem conditions."""

    def __init__(self, message: str, violations: List[str], details: Optional[Dict[str, Any]] = None):
        details = dict(details or {})
        details['violations'] = list(violations)
        super().__init__(message, details)
        self.violations = list(violations)


class UndefinedGeneratorError(ValidationError):
    pass


class WrongParameterError(ValidationError):
    pass


class UnknownFigureError(ValidationError):
    pass


# --- numerical class --------------------------------------------------------

class PrecisionUnreachableError(NumericalFailure):
    pass


class BranchStepError(NumericalFailure):
    pass


class AnsatzMismatchError(NumericalFailure):
    pass


class SingularTruncationError(NumericalFailure):
    pass


class SingularityApproachError(NumericalFailure):
    """Integration stopped near a movable zero or pole of H."""

    def __init__(self, message: str, r: Any, H: Any, details: Optional[Dict[str, Any]] = None):
        details = dict(details or {})
        details.update({'r': str(r), 'H': str(H)})
        super().__init__(message, details)
        self.r = r
        self.H = H


class StepUnderflowError(NumericalFailure):
    pass


class NoZeroFoundError(NumericalFailure):
    def __init__(self, message: str, horizon: Any, details: Optional[Dict[str, Any]] = None):
        details = dict(details or {})
        details['horizon'] = str(horizon)
        super().__init__(message, details)
        self.horizon = horizon


class DivisionInexactError(NumericalFailure):
    pass


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit status."""
    if isinstance(exc, Dp3Error):
        return exc.exit_code
    if isinstance(exc, (ValueError, KeyError)):
        return EXIT_VALIDATION
    return EXIT_NUMERICAL
