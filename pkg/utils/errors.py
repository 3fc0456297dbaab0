"""
Error types for fracplap
Every failure carries its context so reports and the CLI can describe it
"""

from typing import Dict, List, Optional, Sequence, Tuple


class FracPlapError(Exception):
    """Base class for all library errors."""

    EXIT_CODE = 3
    KIND = 'error'

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> Dict:
        """Convert error to dictionary for reports"""
        data = {'kind': self.KIND, 'message': self.message}
        for key, value in self.context.items():
            if isinstance(value, (int, float, str, bool)) or value is None:
                data[key] = value
        return data

    def __repr__(self):
        return f'<{self.__class__.__name__} {self.message}>'


class DomainError(FracPlapError, ValueError):
    """Input outside the domain of the operation."""

    EXIT_CODE = 2
    KIND = 'domain'


class PreconditionError(DomainError):
    """A documented precondition does not hold; `hint` says what to do instead."""

    KIND = 'precondition'

    def __init__(self, message: str, hint: Optional[str] = None, **context):
        super().__init__(message if hint is None else f"{message} ({hint})", hint=hint, **context)
        self.hint = hint


class NumericalError(FracPlapError, ArithmeticError):
    """Base class for numerical failures (exit code 3)."""

    EXIT_CODE = 3
    KIND = 'numerical'


class RangeError(NumericalError):
    """Result overflows double precision."""

    KIND = 'range'

    def __init__(self, message: str, threshold: float, **context):
        super().__init__(message, threshold=threshold, **context)
        self.threshold = threshold


class ConvergenceError(NumericalError):
    """A series or an iteration did not converge."""

    KIND = 'convergence'

    def __init__(self, message: str, branch: Optional[str] = None,
                 table: Optional[Sequence] = None, **context):
        super().__init__(message, branch=branch, **context)
        self.branch = branch
        self.table = list(table) if table is not None else []


class AccuracyError(NumericalError):
    """Quadrature budget exhausted before reaching the requested tolerance."""

    KIND = 'accuracy'

    def __init__(self, message: str, value: float, err_est: float, **context):
        super().__init__(message, value=value, err_est=err_est, **context)
        self.value = value
        self.err_est = err_est


class IntegrandError(NumericalError):
    """Integrand returned NaN or Inf."""

    KIND = 'integrand'

    def __init__(self, message: str, abscissa: float, **context):
        super().__init__(message, abscissa=abscissa, **context)
        self.abscissa = abscissa


class DivergenceError(NumericalError):
    """Principal-value extrapolation did not settle."""

    KIND = 'divergence'

    def __init__(self, message: str, table: List[Tuple[float, float]], **context):
        super().__init__(message, **context)
        self.table = list(table)

    def to_dict(self) -> Dict:
        data = super().to_dict()
        data['table'] = [[eps, value] for eps, value in self.table]
        return data
