"""
Exceptions
==========

**Module name:** :mod:`argzeta.exceptions`

.. currentmodule:: argzeta.exceptions

Error types raised by the library. Each class carries the exit code the
command line reports when the error escapes a subcommand.

Classes
-------

.. autosummary::
   ArgZetaError
   DomainError
   BracketError
   CapacityError
   PrecisionOverflowError
   ConvergenceError
   QuadratureError
   CancellationDetected
   InvariantViolation

Code details
~~~~~~~~~~~~
"""


class ArgZetaError(Exception):
    """Base class for all errors raised by argzeta."""

    exit_code = 1


class DomainError(ArgZetaError, ValueError):
    """An argument lies outside the domain of the requested operation."""

    exit_code = 3


class BracketError(DomainError):
    """A root bracket without a sign change."""


class CapacityError(ArgZetaError, RuntimeError):
    """A prime table or sieve request exceeds the configured capacity."""

    exit_code = 4


class PrecisionOverflowError(CapacityError):
    """The working precision needed for a result exceeds ``max_digits``."""


class ConvergenceError(ArgZetaError, RuntimeError):
    """An iterative computation stopped before reaching its target.

    Args:
        message (str): description of the failure

    Keyword args:
        last_value: the last iterate, if any
        diagnostics (dict): free-form details for the error report
    """

    exit_code = 4

    def __init__(self, message, last_value=None, diagnostics=None):
        super().__init__(message)
        self.last_value = last_value
        self.diagnostics = diagnostics or {}


class QuadratureError(ConvergenceError):
    """Adaptive quadrature hit its node cap before meeting the target."""

    def __init__(self, message, estimate=None, budget=None):
        super().__init__(message, last_value=estimate, diagnostics={"budget": budget})
        self.estimate = estimate
        self.budget = budget


class CancellationDetected(ArgZetaError):
    """Raised internally when a result is swamped by rounding of its terms.

    :func:`argzeta.numerics.retry_with_escalation` catches it and retries at a
    higher working precision.
    """

    exit_code = 4


class InvariantViolation(ArgZetaError, AssertionError):
    """A proved bound or exact identity failed to hold."""

    exit_code = 5
